#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace fbmtp {

class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Dormand-Prince 5(4) with step control, integrating a small smooth system
// d(state)/dx = deriv(state) from x0 to x1. The right-hand side here never
// depends on x explicitly.
template <std::size_t N, class F>
std::array<double, N> dopri5_integrate(F&& deriv, std::array<double, N> y, double x0, double x1,
                                       double rel_tol = 1e-10, double abs_tol = 1e-12) {
    if (x0 == x1) return y;
    const double dir = x1 > x0 ? 1.0 : -1.0;
    const double span = std::abs(x1 - x0);
    if (span < 1e-12) {
        // below every tolerance of interest; one explicit step suffices
        const auto d0 = deriv(y);
        for (std::size_t i = 0; i < N; ++i) y[i] += (x1 - x0) * d0[i];
        return y;
    }
    double h = dir * std::min(span, std::max(span / 16.0, 1e-6));
    double x = x0;

    using V = std::array<double, N>;
    auto axpy = [](V a, const V& b, double c) {
        for (std::size_t i = 0; i < N; ++i) a[i] += c * b[i];
        return a;
    };

    const int max_steps = 1000000;
    V k1 = deriv(y);
    for (int step = 0; step < max_steps; ++step) {
        if ((x - x1) * dir >= 0.0) return y;
        bool last = false;
        if ((x + h - x1) * dir > 0.0) {
            h = x1 - x;
            last = true;
        }

        V y2 = axpy(y, k1, h * (1.0 / 5.0));
        V k2 = deriv(y2);
        V y3 = y;
        for (std::size_t i = 0; i < N; ++i) y3[i] += h * (3.0 / 40.0 * k1[i] + 9.0 / 40.0 * k2[i]);
        V k3 = deriv(y3);
        V y4 = y;
        for (std::size_t i = 0; i < N; ++i)
            y4[i] += h * (44.0 / 45.0 * k1[i] - 56.0 / 15.0 * k2[i] + 32.0 / 9.0 * k3[i]);
        V k4 = deriv(y4);
        V y5 = y;
        for (std::size_t i = 0; i < N; ++i)
            y5[i] += h * (19372.0 / 6561.0 * k1[i] - 25360.0 / 2187.0 * k2[i] +
                          64448.0 / 6561.0 * k3[i] - 212.0 / 729.0 * k4[i]);
        V k5 = deriv(y5);
        V y6 = y;
        for (std::size_t i = 0; i < N; ++i)
            y6[i] += h * (9017.0 / 3168.0 * k1[i] - 355.0 / 33.0 * k2[i] +
                          46732.0 / 5247.0 * k3[i] + 49.0 / 176.0 * k4[i] -
                          5103.0 / 18656.0 * k5[i]);
        V k6 = deriv(y6);
        V ynew = y;
        for (std::size_t i = 0; i < N; ++i)
            ynew[i] += h * (35.0 / 384.0 * k1[i] + 500.0 / 1113.0 * k3[i] + 125.0 / 192.0 * k4[i] -
                            2187.0 / 6784.0 * k5[i] + 11.0 / 84.0 * k6[i]);
        V k7 = deriv(ynew);
        // embedded 4th-order difference
        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double diff = h * ((35.0 / 384.0 - 5179.0 / 57600.0) * k1[i] +
                                     (500.0 / 1113.0 - 7571.0 / 16695.0) * k3[i] +
                                     (125.0 / 192.0 - 393.0 / 640.0) * k4[i] +
                                     (-2187.0 / 6784.0 + 92097.0 / 339200.0) * k5[i] +
                                     (11.0 / 84.0 - 187.0 / 2100.0) * k6[i] +
                                     (0.0 - 1.0 / 40.0) * k7[i]);
            const double sc = abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            const double r = diff / sc;
            err += r * r;
        }
        err = std::sqrt(err / N);

        if (err <= 1.0) {
            x = last ? x1 : x + h; // land exactly on the endpoint
            y = ynew;
            k1 = k7; // FSAL
        }
        double fac = 0.9 * std::pow(err > 1e-300 ? err : 1e-300, -0.2);
        fac = std::min(5.0, std::max(0.2, fac));
        h *= fac;
        if (std::abs(h) < 1e-14 * span) throw IntegrationError("dopri5: step size underflow");
    }
    throw IntegrationError("dopri5: step budget exhausted");
}

} // namespace fbmtp
