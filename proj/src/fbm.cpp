#include "fbmtp/fbm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "fbmtp/io.hpp"
#include "fbmtp/kernels.hpp"

namespace fbmtp {

double ApproxParams::cutoff() const {
    return -std::pow(static_cast<double>(n), -beta / std::abs(hurst - 0.5));
}

void ApproxParams::validate() const {
    if (!(hurst > 0.0) || !(hurst < 1.0))
        throw std::invalid_argument("params: hurst must lie in (0,1)");
    if (hurst == 0.5) throw std::invalid_argument("params: hurst = 1/2 is excluded");
    const double gap = std::abs(hurst - 0.5);
    if (!(beta > gap) || !(beta < 0.5))
        throw std::invalid_argument("params: beta must satisfy |hurst-1/2| < beta < 1/2");
    if (!(delta > 0.0) || !(delta < beta))
        throw std::invalid_argument("params: delta must satisfy 0 < delta < beta");
    if (!(beta + delta < 0.5)) throw std::invalid_argument("params: beta + delta must be < 1/2");
    if (!(a < 0.0)) throw std::invalid_argument("params: a must be negative");
    if (n < 1) throw std::invalid_argument("params: n must be a positive integer");
    if (!(horizon > 0.0)) throw std::invalid_argument("params: horizon must be positive");
    const double eps = cutoff();
    if (!(eps > std::max(a, 1.0 / a)) || !(eps < 0.0))
        throw std::invalid_argument("params: cutoff level escapes (max(a,1/a), 0); increase n");
}

double DriverPath::value_at(double t) const {
    if (t < grid.front() - 1e-12 || t > grid.back() + 1e-12)
        throw std::domain_error("driver: time outside the grid span");
    auto it = std::lower_bound(grid.begin(), grid.end(), t);
    if (it == grid.end()) return values.back();
    std::size_t i = static_cast<std::size_t>(it - grid.begin());
    if (grid[i] == t) return values[i];
    if (i == 0) return values.front();
    const double w = (t - grid[i - 1]) / (grid[i] - grid[i - 1]);
    return values[i - 1] + w * (values[i] - values[i - 1]);
}

double DriverPath::sup_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

void DriverPath::write_csv(std::ostream& os) const {
    os << "# kind=" << (kind == DriverKind::transport_approx ? "transport-approx" : "exact-fbm")
       << '\n';
    os << "# H=" << fmt_full(hurst);
    if (params) {
        os << " beta=" << fmt_full(params->beta) << " a=" << fmt_full(params->a)
           << " n=" << params->n;
    } else {
        os << " beta= a= n=";
    }
    os << '\n';
    os << "# seed=";
    if (seed) os << seed->master_seed << '/' << seed->stream_index;
    os << '\n';
    os << "t,value\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
        os << fmt_full(grid[i]) << ',' << fmt_full(values[i]) << '\n';
}

std::vector<double> uniform_grid(double horizon, int m) {
    if (m < 1 || !(horizon > 0.0)) throw std::invalid_argument("uniform_grid: bad arguments");
    std::vector<double> g(static_cast<std::size_t>(m) + 1);
    for (int k = 0; k <= m; ++k) g[static_cast<std::size_t>(k)] = horizon * k / m;
    return g;
}

namespace {

std::size_t lower_piece(const std::vector<TransportPiece>& ps, double lo) {
    auto it = std::upper_bound(ps.begin(), ps.end(), lo,
                               [](double v, const TransportPiece& p) { return v < p.t1; });
    return static_cast<std::size_t>(it - ps.begin());
}

// Stieltjes sum over pieces with a closed-form kernel antiderivative.
template <class Prim>
double stieltjes_closed(const std::vector<TransportPiece>& ps, double lo, double hi, Prim&& prim) {
    if (!(hi > lo)) return 0.0;
    double acc = 0.0, prev = 0.0;
    bool have = false;
    for (std::size_t i = lower_piece(ps, lo); i < ps.size(); ++i) {
        const TransportPiece& p = ps[i];
        if (p.t0 >= hi) break;
        const double c = std::max(p.t0, lo);
        const double d = std::min(p.t1, hi);
        if (d <= c) continue;
        const double pc = (have && c == p.t0) ? prev : prim(c);
        const double pd = prim(d);
        acc += p.slope * (pd - pc);
        prev = pd;
        have = (d == p.t1);
    }
    return acc;
}

// Far-history term: integral of the path against the t-kernel density,
// closed form per linear piece (u = 1/v substitution).
double tail_term_fast(double hurst, double cap, double t, const TransportPath& z3) {
    if (t == 0.0) return 0.0;
    const double hi = cap < 0.0 ? cap : 0.0;
    double acc = 0.0, prev_a = 0.0, prev_f = 0.0;
    bool have = false;
    for (const TransportPiece& p : z3.pieces()) {
        if (p.t0 >= hi) break;
        const double c = p.t0;
        const double d = std::min(p.t1, hi);
        if (d <= c) continue;
        const double icpt = p.v0 - p.slope * p.t0; // value extrapolated to v = 0
        double ac, fc;
        if (have && c == p.t0) {
            ac = prev_a;
            fc = prev_f;
        } else {
            const double u = 1.0 / c;
            ac = tail_antideriv(hurst, t, u);
            fc = mvn_kernel_past(hurst, t, u);
        }
        double ad, fd;
        if (d == 0.0) {
            ad = 0.0;
            fd = 0.0;
        } else {
            const double u = 1.0 / d;
            ad = tail_antideriv(hurst, t, u);
            fd = mvn_kernel_past(hurst, t, u);
        }
        acc -= icpt * (ad - ac) + p.slope * (fd - fc);
        prev_a = ad;
        prev_f = fd;
        have = (d == p.t1);
    }
    return acc;
}

// The exact split of the driving noise correlates the [a,0] segment with the
// compactified far segment through the shared value at a. With independently
// generated transport paths that correlation is restored by a scalar bridge
// correction on the far segment; kappa_t below is the integrated far-segment
// weight, and the corrected driver matches the target joint law up to the
// cutoff truncation.
double boundary_bridge_scale(const ApproxParams& prm, const TransportPath& z2,
                             const TransportPath& z3) {
    return -(z2.value_at(prm.a) + prm.a * z3.value_at(1.0 / prm.a));
}

double boundary_bridge_weight(const ApproxParams& prm, double t) {
    if (t == 0.0) return 0.0;
    const double H = prm.hurst;
    double kappa = mvn_kernel_past(H, t, prm.a);
    if (H > 0.5) kappa -= mvn_kernel_past(H, t, 1.0 / prm.cutoff());
    return kappa;
}

double driver_value_fast(const ApproxParams& prm, double t, const TransportPath& z1,
                         const TransportPath& z2, const TransportPath& z3) {
    const double H = prm.hurst;
    const double a = prm.a;
    const double eps = prm.cutoff();
    const double q = H + 0.5;
    double sum = boundary_bridge_scale(prm, z2, z3) * boundary_bridge_weight(prm, t);
    if (H > 0.5) {
        sum += stieltjes_closed(z1.pieces(), 0.0, t,
                                [&](double s) { return -std::pow(t - s, q) / q; });
        sum += stieltjes_closed(z2.pieces(), a, 0.0, [&](double s) {
            return (-std::pow(t - s, q) + std::pow(-s, q)) / q;
        });
        sum += mvn_kernel_past(H, t, a) * z2.value_at(a);
        sum += tail_term_fast(H, eps, t, z3);
    } else {
        const double split = std::max(t + eps, 0.0);
        const double ts = t - eps; // shifted upper time of the second window term
        sum += stieltjes_closed(z1.pieces(), 0.0, split,
                                [&](double s) { return -std::pow(t - s, q) / q; });
        sum += stieltjes_closed(z1.pieces(), split, t,
                                [&](double s) { return -std::pow(ts - s, q) / q; });
        sum += stieltjes_closed(z2.pieces(), a, eps, [&](double s) {
            return (-std::pow(t - s, q) + std::pow(-s, q)) / q;
        });
        sum += mvn_kernel_past(H, t, a) * z2.value_at(a);
        sum += tail_term_fast(H, 0.0, t, z3);
    }
    return sum;
}

double driver_value_reference(const ApproxParams& prm, double t, const TransportPath& z1,
                              const TransportPath& z2, const TransportPath& z3, double rel_tol) {
    const double H = prm.hurst;
    const double a = prm.a;
    const double eps = prm.cutoff();
    double sum = boundary_bridge_scale(prm, z2, z3) * boundary_bridge_weight(prm, t);
    if (H > 0.5) {
        sum += z1.integrate_primitive([&](double s) { return mvn_primitive_recent(H, t, s); }, 0.0,
                                      t);
        sum += z2.integrate_primitive([&](double s) { return mvn_primitive_past(H, t, s); }, a, 0.0);
        sum += mvn_kernel_past(H, t, a) * z2.value_at(a);
        if (t > 0.0) {
            sum += z3.integrate_adaptive(
                [&](double s) { return tail_kernel(H, a, eps, t, s); }, 1.0 / a, eps, rel_tol);
            // the weight is constant past the cutoff level
            sum += tail_kernel(H, a, eps, t, eps) * (0.0 - z3.value_at(eps));
        }
    } else {
        const double split = std::max(t + eps, 0.0);
        const double bound_b = std::pow(-eps, H - 0.5);
        if (split > 0.0)
            sum += z1.integrate_primitive([&](double s) { return mvn_primitive_recent(H, t, s); },
                                          0.0, split);
        sum += z1.integrate_adaptive(
            [&](double s) {
                const double v = mvn_kernel_recent(H, t - eps, s);
                if (v > bound_b * (1.0 + 1e-9))
                    throw std::logic_error("shifted window kernel exceeded its cap");
                return v;
            },
            split, t, rel_tol);
        sum += z2.integrate_primitive([&](double s) { return mvn_primitive_past(H, t, s); }, a, eps);
        sum += mvn_kernel_past(H, t, a) * z2.value_at(a);
        if (t > 0.0)
            sum += z3.integrate_adaptive(
                [&](double s) { return tail_kernel(H, a, 0.0, t, s); }, 1.0 / a, 0.0, rel_tol);
    }
    return sum;
}

void check_path(const TransportPath& z, Orientation orient, double lo, double hi, double rate,
                const char* which) {
    const double tol = 1e-9;
    if (z.orientation() != orient || std::abs(z.rate() - rate) > tol * rate ||
        std::abs(z.interval_lo() - lo) > tol || std::abs(z.interval_hi() - hi) > tol) {
        std::ostringstream os;
        os << "driver: " << which << " must be " << (orient == Orientation::forward ? "forward" : "backward")
           << " on [" << lo << ", " << hi << "] with rate " << rate;
        throw std::invalid_argument(os.str());
    }
}

} // namespace

DriverPath build_transport_driver(const ApproxParams& params, const TransportPath& z1,
                                  const TransportPath& z2, const TransportPath& z3,
                                  std::vector<double> grid, BuildMode mode, double quad_rel_tol) {
    params.validate();
    const double rate = static_cast<double>(params.n);
    check_path(z1, Orientation::forward, 0.0, params.horizon, rate, "z1");
    check_path(z2, Orientation::backward, params.a, 0.0, rate, "z2");
    check_path(z3, Orientation::backward, 1.0 / params.a, 0.0, rate, "z3");

    if (grid.empty() || grid.front() != 0.0) grid.insert(grid.begin(), 0.0);
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument("driver: grid must be strictly increasing");
    if (grid.back() > params.horizon + 1e-12)
        throw std::invalid_argument("driver: grid exceeds the horizon");

    const double scale = mvn_normalization(params.hurst);
    std::vector<double> values(grid.size(), 0.0);
    const long count = static_cast<long>(grid.size());
    if (mode == BuildMode::fast) {
        std::exception_ptr fail = nullptr;
#pragma omp parallel for schedule(static)
        for (long i = 1; i < count; ++i) {
            try {
                values[static_cast<std::size_t>(i)] = scale *
                    driver_value_fast(params, grid[static_cast<std::size_t>(i)], z1, z2, z3);
            } catch (...) {
#pragma omp critical(driver_fail)
                if (!fail) fail = std::current_exception();
            }
        }
        if (fail) std::rethrow_exception(fail);
    } else {
        for (long i = 1; i < count; ++i)
            values[static_cast<std::size_t>(i)] =
                scale * driver_value_reference(params, grid[static_cast<std::size_t>(i)], z1, z2, z3,
                                               quad_rel_tol);
    }

    DriverPath out;
    out.grid = std::move(grid);
    out.values = std::move(values);
    out.kind = DriverKind::transport_approx;
    out.hurst = params.hurst;
    out.params = params;
    double lip = 0.0;
    for (std::size_t i = 1; i < out.grid.size(); ++i)
        lip = std::max(lip,
                       std::abs(out.values[i] - out.values[i - 1]) / (out.grid[i] - out.grid[i - 1]));
    out.lipschitz = lip;
    return out;
}

DriverPath make_transport_driver(const ApproxParams& params, std::vector<double> grid, RngSeed seed,
                                 BuildMode mode) {
    const double rate = static_cast<double>(params.n);
    TransportPath z1 = TransportPath::generate(
        rate, params.horizon, Orientation::forward, {seed.master_seed, seed.stream_index * 3});
    TransportPath z2 = TransportPath::generate(
        rate, -params.a, Orientation::backward, {seed.master_seed, seed.stream_index * 3 + 1});
    TransportPath z3 = TransportPath::generate(
        rate, -1.0 / params.a, Orientation::backward, {seed.master_seed, seed.stream_index * 3 + 2});
    DriverPath d = build_transport_driver(params, z1, z2, z3, std::move(grid), mode);
    d.seed = seed;
    return d;
}

namespace {

// In-place lower Cholesky; returns false on a nonpositive pivot.
bool cholesky_lower(std::vector<double>& m, std::size_t k) {
    for (std::size_t j = 0; j < k; ++j) {
        double d = m[j * k + j];
        for (std::size_t c = 0; c < j; ++c) d -= m[j * k + c] * m[j * k + c];
        if (!(d > 0.0)) return false;
        const double ljj = std::sqrt(d);
        m[j * k + j] = ljj;
        for (std::size_t i = j + 1; i < k; ++i) {
            double s = m[i * k + j];
            for (std::size_t c = 0; c < j; ++c) s -= m[i * k + c] * m[j * k + c];
            m[i * k + j] = s / ljj;
        }
        for (std::size_t c = j + 1; c < k; ++c) m[j * k + c] = 0.0;
    }
    return true;
}

} // namespace

DriverPath exact_fbm(double hurst, std::vector<double> grid, RngSeed seed) {
    if (!(hurst > 0.0) || !(hurst < 1.0))
        throw std::invalid_argument("exact_fbm: hurst must lie in (0,1)");
    if (grid.empty() || grid.front() != 0.0) grid.insert(grid.begin(), 0.0);
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument("exact_fbm: grid must be strictly increasing (no duplicates)");
    if (grid.front() < 0.0) throw std::invalid_argument("exact_fbm: times must be nonnegative");
    const std::size_t k = grid.size() - 1;
    if (k > 4096) throw std::invalid_argument("exact_fbm: grid capped at 4096 points");

    DriverPath out;
    out.kind = DriverKind::exact_fbm;
    out.hurst = hurst;
    out.seed = seed;
    out.values.assign(grid.size(), 0.0);

    if (k > 0) {
        std::vector<double> cov(k * k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j)
                cov[i * k + j] = fbm_covariance(hurst, grid[i + 1], grid[j + 1]);
        std::vector<double> fac = cov;
        if (!cholesky_lower(fac, k)) {
            fac = cov;
            for (std::size_t i = 0; i < k; ++i) fac[i * k + i] += 1e-12;
            if (!cholesky_lower(fac, k))
                throw FactorizationError("exact_fbm: covariance not positive definite after jitter");
        }
        CounterRng rng(seed);
        std::vector<double> z(k);
        for (std::size_t i = 0; i < k; ++i) z[i] = rng.next_normal();
        for (std::size_t i = 0; i < k; ++i) {
            double s = 0.0;
            for (std::size_t c = 0; c <= i; ++c) s += fac[i * k + c] * z[c];
            out.values[i + 1] = s;
        }
    }
    out.grid = std::move(grid);
    return out;
}

double lipschitz_ratio(const DriverPath& driver) {
    if (driver.kind != DriverKind::transport_approx || !driver.params)
        throw std::invalid_argument("lipschitz audit applies to transport drivers only");
    double lip = 0.0;
    for (std::size_t i = 1; i < driver.grid.size(); ++i)
        lip = std::max(lip, std::abs(driver.values[i] - driver.values[i - 1]) /
                                (driver.grid[i] - driver.grid[i - 1]));
    const ApproxParams& p = *driver.params;
    return lip / std::pow(static_cast<double>(p.n), 1.0 + p.beta);
}

BoundReport lipschitz_audit(const DriverPath& driver) {
    const double khat = lipschitz_ratio(driver);
    const ApproxParams& p = *driver.params;
    double lip = 0.0;
    for (std::size_t i = 1; i < driver.grid.size(); ++i)
        lip = std::max(lip, std::abs(driver.values[i] - driver.values[i - 1]) /
                                (driver.grid[i] - driver.grid[i - 1]));
    BoundReport r;
    r.name = "grid-lipschitz";
    r.measured = lip;
    r.bound = lip; // K^ n^{1+beta} with K^ measured on this path
    std::ostringstream os;
    os << "khat=" << khat << " n=" << p.n << " beta=" << p.beta;
    r.context = os.str();
    return r;
}

} // namespace fbmtp
