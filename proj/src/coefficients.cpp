#include "fbmtp/coefficients.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace fbmtp {

CoefficientSet preset_linear(double b0, double c, double x0) {
    CoefficientSet s;
    s.sigma = [c](double) { return c; };
    s.dsigma = [](double) { return 0.0; };
    s.ddsigma = [](double) { return 0.0; };
    s.b = [b0](double) { return b0; };
    s.db = [](double) { return 0.0; };
    s.m1 = std::abs(b0);
    s.m2 = 0.0;
    s.m3 = 0.0;
    s.m4 = 0.0;
    s.m5 = std::abs(c);
    s.x0 = x0;
    s.name = "linear";
    return s;
}

CoefficientSet preset_sin_cos(double x0) {
    CoefficientSet s;
    s.sigma = [](double x) { return std::sin(x); };
    s.dsigma = [](double x) { return std::cos(x); };
    s.ddsigma = [](double x) { return -std::sin(x); };
    s.b = [](double x) { return std::cos(x); };
    s.db = [](double x) { return -std::sin(x); };
    s.m1 = s.m2 = s.m3 = s.m4 = s.m5 = 1.0;
    s.x0 = x0;
    s.name = "sin-cos";
    return s;
}

CoefficientSet preset_arctan(double x0) {
    CoefficientSet s;
    s.sigma = [](double x) { return std::atan(x); };
    s.dsigma = [](double x) { return 1.0 / (1.0 + x * x); };
    s.ddsigma = [](double x) {
        const double d = 1.0 + x * x;
        return -2.0 * x / (d * d);
    };
    s.b = [](double x) { return std::cos(x); };
    s.db = [](double x) { return -std::sin(x); };
    s.m1 = 1.0;
    s.m2 = 1.0;
    s.m3 = 3.0 * std::sqrt(3.0) / 8.0; // max |sigma''| at x = +-1/sqrt(3)
    s.m4 = 1.0;
    s.m5 = std::numbers::pi / 2.0;
    s.x0 = x0;
    s.name = "arctan-demo";
    return s;
}

CoefficientSet coefficient_preset(const std::string& name, double b0, double c, double x0) {
    if (name == "linear") return preset_linear(b0, c, x0);
    if (name == "sin-cos") return preset_sin_cos(x0);
    if (name == "arctan-demo") return preset_arctan(x0);
    throw std::invalid_argument("unknown coefficient preset: " + name);
}

BoundReport validate_coeffs(const CoefficientSet& c, double lo, double hi, int samples) {
    if (samples < 2 || !(hi > lo)) throw std::invalid_argument("validate_coeffs: bad sample grid");
    struct Item {
        const char* label;
        const std::function<double(double)>* fn;
        double cap;
    };
    const Item items[] = {
        {"|sigma|", &c.sigma, c.m5},   {"|sigma'|", &c.dsigma, c.m2}, {"|sigma''|", &c.ddsigma, c.m3},
        {"|b|", &c.b, c.m1},           {"|b'|", &c.db, c.m4},
    };
    double worst = -std::numeric_limits<double>::infinity();
    std::ostringstream ctx;
    ctx << "grid [" << lo << ", " << hi << "] x " << samples;
    for (const Item& it : items) {
        double mx = 0.0, arg = lo;
        for (int i = 0; i < samples; ++i) {
            const double x = lo + (hi - lo) * i / (samples - 1);
            const double v = std::abs((*it.fn)(x));
            if (v > mx) {
                mx = v;
                arg = x;
            }
        }
        const double excess = mx - it.cap;
        if (excess > worst) worst = excess;
        ctx << "; max " << it.label << " = " << mx << " vs " << it.cap;
        if (excess > 0.0) ctx << " VIOLATED at x=" << arg;
    }
    BoundReport r;
    r.name = "coefficient-bounds[" + c.name + "]";
    r.measured = worst; // worst excess; <= 0 passes
    r.bound = 0.0;
    r.context = ctx.str();
    return r;
}

} // namespace fbmtp
