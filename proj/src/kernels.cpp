#include "fbmtp/kernels.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fbmtp/quadrature.hpp"

namespace fbmtp {

namespace {

void check_hurst(double hurst) {
    if (!(hurst > 0.0) || !(hurst < 1.0))
        throw std::domain_error("hurst index must lie in (0,1)");
}

void check_hurst_fractional(double hurst) {
    check_hurst(hurst);
    if (hurst == 0.5) throw std::domain_error("hurst = 1/2 excluded here");
}

// x^q - (x+d)^q for x > 0, d >= 0, stable when d << x.
double pow_diff(double x, double d, double q) {
    if (d == 0.0) return 0.0;
    if (d < 0.25 * x) return -std::pow(x, q) * std::expm1(q * std::log1p(d / x));
    return std::pow(x, q) - std::pow(x + d, q);
}

} // namespace

double mvn_kernel_recent(double hurst, double t, double s) {
    check_hurst(hurst);
    if (!(s < t)) throw std::domain_error("window kernel needs s < t");
    return std::pow(t - s, hurst - 0.5);
}

double mvn_kernel_past(double hurst, double t, double s) {
    check_hurst(hurst);
    if (std::isinf(s) && s < 0.0) return 0.0;
    if (!(s < 0.0) || !(t >= 0.0)) throw std::domain_error("history kernel needs s < 0 <= t");
    // (t-s)^p - (-s)^p, p = H - 1/2
    return -pow_diff(-s, t, hurst - 0.5);
}

double mvn_kernel_past_ds(double hurst, double t, double s) {
    check_hurst(hurst);
    if (!(s < 0.0) || !(t >= 0.0))
        throw std::domain_error("history kernel derivative needs s < 0 <= t");
    const double p = hurst - 0.5;
    return p * pow_diff(-s, t, hurst - 1.5);
}

double mvn_primitive_recent(double hurst, double t, double s) {
    const double q = hurst + 0.5;
    return -std::pow(t - s, q) / q;
}

double mvn_primitive_past(double hurst, double t, double s) {
    const double q = hurst + 0.5;
    return (-std::pow(t - s, q) + std::pow(-s, q)) / q;
}

double tail_antideriv(double hurst, double t, double u) {
    if (std::isinf(u) && u < 0.0) {
        if (hurst > 0.5) throw std::domain_error("tail antiderivative diverges at -inf for H > 1/2");
        return 0.0;
    }
    if (!(u < 0.0) || !(t >= 0.0)) throw std::domain_error("tail antiderivative needs u < 0 <= t");
    const double p = hurst - 0.5;
    const double q = hurst + 0.5;
    // (p/q) [(-u)^q - (t-u)^q] + t (t-u)^p
    return (p / q) * pow_diff(-u, t, q) + t * std::pow(t - u, p);
}

namespace {

// s = 0 is allowed for the uncapped branch and maps to u = -inf.
double tail_range_check(double a, double cutoff, double s) {
    if (!(a < 0.0)) throw std::domain_error("tail kernel needs a < 0");
    const double lo = 1.0 / a;
    if (s < lo - 1e-12 || s > 0.0)
        throw std::domain_error("tail kernel argument outside [1/a, 0)");
    double s_eff = cutoff < 0.0 ? std::min(s, cutoff) : s;
    return std::max(s_eff, lo);
}

} // namespace

double tail_kernel(double hurst, double a, double cutoff, double t, double s) {
    check_hurst_fractional(hurst);
    if (!(t >= 0.0)) throw std::domain_error("tail kernel needs t >= 0");
    const double s_eff = tail_range_check(a, cutoff, s);
    if (s_eff <= 1.0 / a) return 0.0; // empty inner range
    const double u = s_eff == 0.0 ? -std::numeric_limits<double>::infinity() : 1.0 / s_eff;
    return tail_antideriv(hurst, t, u) - tail_antideriv(hurst, t, a);
}

double tail_kernel_quad(double hurst, double a, double cutoff, double t, double s, double rel_tol) {
    check_hurst_fractional(hurst);
    if (!(t >= 0.0)) throw std::domain_error("tail kernel needs t >= 0");
    const double s_eff = tail_range_check(a, cutoff, s);
    if (s_eff <= 1.0 / a) return 0.0;
    if (t == 0.0) return 0.0;
    QuadOptions opt;
    opt.rel_tol = rel_tol;
    opt.abs_tol = 1e-14;
    // integration variable mapped as u = a e^w so the far tail is resolved;
    // du = u dw
    const double w_hi = s_eff == 0.0 ? std::min(40.0 / (0.5 - hurst), 700.0)
                                     : std::log((1.0 / s_eff) / a);
    auto mapped = [&](double w) {
        const double u = a * std::exp(w);
        return u * u * mvn_kernel_past_ds(hurst, t, u);
    };
    return adaptive_simpson(mapped, 0.0, w_hi, opt);
}

double mvn_normalization(double hurst) {
    check_hurst_fractional(hurst);
    const double p = hurst - 0.5;
    const double two_h = 2.0 * hurst;

    QuadOptions opt;
    opt.rel_tol = 1e-12;
    opt.abs_tol = 1e-13;

    // cross term of the squared history kernel on [0,1], log substitution
    const double u1 = 80.0 / (1.0 + p);
    const double q1 = adaptive_simpson(
        [&](double u) {
            const double x = std::exp(u);
            return std::exp(u * (1.0 + p)) * std::pow(1.0 + x, p);
        },
        -u1, 0.0, opt);

    // squared history kernel beyond [-1, 0], mapped to (0,1] then log substituted
    const double u2 = std::min(2000.0, 80.0 / (1.0 - 2.0 * p));
    const double a2 = adaptive_simpson(
        [&](double u) {
            if (u < -40.0) return p * p * std::exp(u * (1.0 - 2.0 * p));
            const double y = std::exp(u);
            const double d = std::expm1(p * std::log1p(y));
            return std::exp(u * (-2.0 * p - 1.0)) * d * d;
        },
        -u2, 0.0, opt);

    const double total = (std::pow(2.0, two_h) + 1.0) / two_h - 2.0 * q1 + a2;
    return 1.0 / std::sqrt(total);
}

double fbm_covariance(double hurst, double s, double t) {
    check_hurst(hurst);
    if (s < 0.0 || t < 0.0) throw std::domain_error("fbm covariance needs s, t >= 0");
    const double two_h = 2.0 * hurst;
    return 0.5 * (std::pow(s, two_h) + std::pow(t, two_h) - std::pow(std::abs(s - t), two_h));
}

} // namespace fbmtp
