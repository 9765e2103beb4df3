#pragma once

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fbmtp {

// Raised when adaptive refinement cannot reach the requested tolerance.
// Carries the worst remaining subinterval for diagnosis.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& msg, double lo, double hi, double err)
        : std::runtime_error(msg + " (worst subinterval [" + std::to_string(lo) + ", " +
                             std::to_string(hi) + "], err~" + std::to_string(err) + ")"),
          worst_lo(lo), worst_hi(hi), err_estimate(err) {}
    double worst_lo;
    double worst_hi;
    double err_estimate;
};

struct QuadOptions {
    double rel_tol = 1e-10;
    double abs_tol = 0.0; // 0: purely relative
    int max_depth = 60;
};

// Adaptive Simpson with tolerance halving. Integrands must be finite on
// [a,b]; endpoint singularities are expected to be removed by substitution
// before calling.
template <class F>
double adaptive_simpson(F&& f, double a, double b, QuadOptions opt = {}) {
    if (a == b) return 0.0;
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }
    auto simpson = [](double lo, double hi, double flo, double fmid, double fhi) {
        return (hi - lo) * (flo + 4.0 * fmid + fhi) / 6.0;
    };

    struct Panel {
        double a, b, fa, fm, fb, s, tol;
        int depth;
    };

    const double m0 = 0.5 * (a + b);
    const double fa0 = f(a), fm0 = f(m0), fb0 = f(b);
    const double s0 = simpson(a, b, fa0, fm0, fb0);
    double tol0 = std::max(opt.abs_tol, opt.rel_tol * std::abs(s0));
    if (tol0 <= 0.0) tol0 = 1e-300;

    std::vector<Panel> stack;
    stack.push_back({a, b, fa0, fm0, fb0, s0, tol0, 0});

    double total = 0.0;
    double unconverged = 0.0;
    double bad_err = 0.0, bad_lo = a, bad_hi = b;
    long budget = 4000000;
    while (!stack.empty()) {
        if (--budget < 0)
            throw QuadratureError("adaptive quadrature panel budget exhausted", stack.back().a,
                                  stack.back().b, bad_err);
        Panel p = stack.back();
        stack.pop_back();
        const double m = 0.5 * (p.a + p.b);
        const double lm = 0.5 * (p.a + m);
        const double rm = 0.5 * (m + p.b);
        const double flm = f(lm), frm = f(rm);
        const double sl = simpson(p.a, m, p.fa, flm, p.fm);
        const double sr = simpson(m, p.b, p.fm, frm, p.fb);
        const double err = (sl + sr - p.s) / 15.0;
        if (!std::isfinite(sl + sr))
            throw QuadratureError("non-finite integrand", p.a, p.b, err);
        if (std::abs(err) <= p.tol || p.depth >= opt.max_depth) {
            total += sl + sr + err;
            if (std::abs(err) > p.tol) {
                unconverged += std::abs(err);
                if (std::abs(err) > bad_err) {
                    bad_err = std::abs(err);
                    bad_lo = p.a;
                    bad_hi = p.b;
                }
            }
        } else {
            stack.push_back({p.a, m, p.fa, flm, p.fm, sl, 0.5 * p.tol, p.depth + 1});
            stack.push_back({m, p.b, p.fm, frm, p.fb, sr, 0.5 * p.tol, p.depth + 1});
        }
    }
    // individual panels may stop early at max depth; only a global breach
    // of the tolerance is a failure
    if (unconverged > std::max(tol0, opt.rel_tol * std::abs(total)))
        throw QuadratureError("adaptive quadrature did not converge", bad_lo, bad_hi, bad_err);
    return sign * total;
}

// Deterministic pairwise summation; result independent of thread count as
// long as the input order is fixed.
inline double pairwise_sum(const double* v, std::size_t n) {
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

} // namespace fbmtp
