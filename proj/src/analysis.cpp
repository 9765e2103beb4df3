#include "fbmtp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fbmtp/kernels.hpp"
#include "fbmtp/quadrature.hpp"

namespace fbmtp {

namespace {

void require_same_grid(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("sup_norm_diff: grid mismatch");
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > 1e-12) throw std::invalid_argument("sup_norm_diff: grid mismatch");
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t k = v.size();
    if (k == 0) return 0.0;
    return k % 2 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

} // namespace

double sup_norm_diff(const DriverPath& p1, const DriverPath& p2) {
    require_same_grid(p1.grid, p2.grid);
    return sup_diff(p1.values, p2.values);
}

double sup_norm_diff(const SolutionPath& p1, const SolutionPath& p2) {
    require_same_grid(p1.grid, p2.grid);
    if (!p1.x.empty() && !p2.x.empty()) return sup_diff(p1.x, p2.x);
    if (p1.x.empty() != p2.x.empty())
        throw std::invalid_argument("sup_norm_diff: one path composed, the other not");
    return sup_diff(p1.y, p2.y);
}

double target_rate(double n, double beta, double delta) {
    if (!(n > 1.0)) throw std::invalid_argument("target_rate: n must exceed 1");
    if (!(delta > 0.0) || !(delta < beta) || !(beta < 0.5) || !(beta + delta < 0.5))
        throw std::invalid_argument("target_rate: invalid (beta, delta)");
    return std::pow(n, -0.5 + beta + delta) * std::pow(std::log(n), 2.5);
}

RateFit rate_fit(std::span<const double> ns, std::span<const double> errors) {
    const std::size_t k = ns.size();
    if (k < 2 || errors.size() != k) throw std::invalid_argument("rate_fit: need >= 2 points");
    std::vector<double> lx(k), ly(k);
    for (std::size_t i = 0; i < k; ++i) {
        if (i > 0 && !(ns[i] > ns[i - 1]))
            throw std::invalid_argument("rate_fit: n must be strictly increasing");
        if (!(ns[i] > 0.0) || !(errors[i] > 0.0))
            throw std::invalid_argument("rate_fit: n and errors must be positive");
        lx[i] = std::log(ns[i]);
        ly[i] = std::log(errors[i]);
    }
    const double xbar = pairwise_sum(lx) / k;
    const double ybar = pairwise_sum(ly) / k;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        sxx += (lx[i] - xbar) * (lx[i] - xbar);
        sxy += (lx[i] - xbar) * (ly[i] - ybar);
    }
    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = ybar - fit.slope * xbar;
    double ss = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / k);
    return fit;
}

RateFit rate_fit(const std::vector<int>& ns, const std::vector<double>& errors) {
    std::vector<double> nd(ns.begin(), ns.end());
    return rate_fit(std::span<const double>(nd), std::span<const double>(errors));
}

std::vector<BoundReport> check_h_bounds(const CoefficientSet& c, const SampleSpec& spec) {
    const FlowMap flow(c, 1e-10);
    const double m1 = c.m1, m2 = c.m2, m3 = c.m3, m4 = c.m4, m5 = c.m5;

    struct Worst {
        double excess = -std::numeric_limits<double>::infinity();
        double x = 0, y = 0;
        void update(double e, double xx, double yy) {
            if (e > excess) {
                excess = e;
                x = xx;
                y = yy;
            }
        }
    };
    Worst w[8];

    for (int iy = 0; iy < spec.ny; ++iy) {
        const double y = spec.y_lo + (spec.y_hi - spec.y_lo) * iy / (spec.ny - 1);
        const double ay = std::abs(y);
        const double cap1 = std::exp(m2 * ay);
        const double cap3 = m3 * ay * std::exp(2.0 * m2 * ay);
        const double cap8 = std::exp(2.0 * m2 * ay) * (m1 * m3 * ay + m4);
        for (int ix = 0; ix < spec.nx; ++ix) {
            const double x = spec.x_lo + (spec.x_hi - spec.x_lo) * ix / (spec.nx - 1);
            const FlowMap::Result r0 = flow.solve(x, y);
            const FlowMap::Result rp = flow.solve(x + spec.fd_step, y);
            const FlowMap::Result rm = flow.solve(x - spec.fd_step, y);
            const FlowMap::Result r1 = flow.solve(x + spec.pair_dx, y);
            const FlowMap::Result ry = flow.solve(x, y + spec.pair_dy);

            const double inv0 = std::exp(-r0.log_dx);
            const double inv1 = std::exp(-r1.log_dx);

            w[0].update(std::abs(r0.dx()) - cap1, x, y);
            w[1].update(inv0 - cap1, x, y);
            const double fd = (std::exp(-rp.log_dx) - std::exp(-rm.log_dx)) / (2.0 * spec.fd_step);
            w[2].update(std::abs(fd) - cap3, x, y);
            w[3].update(std::abs(r0.value - r1.value) - cap1 * spec.pair_dx, x, y);
            w[4].update(std::abs(inv0 - inv1) - cap3 * spec.pair_dx, x, y);
            w[5].update(std::abs(c.b(r0.value) - c.b(r1.value)) - m4 * cap1 * spec.pair_dx, x, y);
            w[6].update(std::abs(c.b(r0.value) - c.b(ry.value)) - m4 * m5 * spec.pair_dy, x, y);
            w[7].update(std::abs(inv0 * c.b(r0.value) - inv1 * c.b(r1.value)) -
                            cap8 * spec.pair_dx,
                        x, y);
        }
    }

    const char* names[8] = {"dx-sensitivity-cap",       "inverse-sensitivity-cap",
                            "inverse-sensitivity-x-derivative-cap", "flow-x-lipschitz",
                            "inverse-sensitivity-x-lipschitz",      "drift-flow-x-lipschitz",
                            "drift-flow-y-lipschitz",   "effective-drift-x-lipschitz"};
    std::vector<BoundReport> out;
    out.reserve(8);
    for (int i = 0; i < 8; ++i) {
        BoundReport r;
        r.name = names[i];
        r.measured = w[i].excess; // worst lhs - rhs
        r.bound = 0.0;
        std::ostringstream os;
        os << "worst at (x=" << w[i].x << ", y=" << w[i].y << "), excess convention";
        r.context = os.str();
        out.push_back(std::move(r));
    }
    return out;
}

BoundReport check_arctan_floor(const SampleSpec& spec) {
    const CoefficientSet c = preset_arctan();
    const FlowMap flow(c, 1e-10);
    double worst = -std::numeric_limits<double>::infinity();
    double wx = 0, wy = 0;
    const double x_lo = -2.5, x_hi = -0.1, y_lo = -2.2, y_hi = -0.1;
    for (int iy = 0; iy < spec.ny; ++iy) {
        const double y = y_lo + (y_hi - y_lo) * iy / (spec.ny - 1);
        for (int ix = 0; ix < spec.nx; ++ix) {
            const double x = x_lo + (x_hi - x_lo) * ix / (spec.nx - 1);
            const double inv = std::exp(-flow.solve(x, y).log_dx);
            const double floor = std::exp(std::abs(y) / (1.0 + x * x));
            const double excess = floor - inv; // must stay <= 0
            if (excess > worst) {
                worst = excess;
                wx = x;
                wy = y;
            }
        }
    }
    BoundReport r;
    r.name = "arctan-inverse-sensitivity-floor";
    r.measured = worst;
    r.bound = 0.0;
    std::ostringstream os;
    os << "floor exp(|y|/(1+x^2)) <= exp(-I); worst at (x=" << wx << ", y=" << wy
       << "); unbounded as y -> -inf";
    r.context = os.str();
    return r;
}

BoundReport check_h_euler_bound(const CoefficientSet& c, int n, int l) {
    if (l <= n || n < 1) throw std::invalid_argument("flow-grid check needs l > n >= 1");
    const FlowMap flow(c, 1e-11);
    const EulerFlowGrid grid(c, l);
    double worst = 0.0, wx = 0, wy = 0;
    const int half = n * l;
    for (int iy = -half; iy <= half; ++iy) {
        const double y = static_cast<double>(iy) / l;
        for (int ix = -half; ix <= half; ++ix) {
            const double x = static_cast<double>(ix) / l;
            const double d = std::abs(flow.solve(x, y).value - grid.value(x, y));
            if (d > worst) {
                worst = d;
                wx = x;
                wy = y;
            }
        }
    }
    const double mbar = c.mbar();
    BoundReport r;
    r.name = "flow-grid-error";
    r.measured = worst;
    r.bound = mbar * mbar * (static_cast<double>(n) / l) * std::exp(mbar * n);
    std::ostringstream os;
    os << "n=" << n << " l=" << l << " worst at (x=" << wx << ", y=" << wy << ")";
    r.context = os.str();
    return r;
}

ProofQuantities proof_quantities(const CoefficientSet& c, const ApproxParams& params, int m,
                                 const DriverPath& driver) {
    ProofQuantities q;
    q.sup_b = driver.sup_abs();
    q.khat = lipschitz_ratio(driver);
    const double t_hor = params.horizon;
    const double n = static_cast<double>(params.n);
    const double r_m = t_hor / m;
    const double mbar = c.mbar();
    q.z1 = std::exp(2.0 * c.m2 * q.sup_b) * (c.m1 * c.m3 * q.sup_b + c.m4);
    q.z2 = (c.m1 * c.m2 + c.m5 * c.m4) * std::exp(c.m2 * q.sup_b);
    q.y_sup_bound = std::abs(c.x0) + t_hor * c.m1 * std::exp(c.m2 * q.sup_b);
    q.nbox = std::max(q.sup_b, q.y_sup_bound);
    const double lip = q.khat * std::pow(n, 1.0 + params.beta);
    q.j_nm = q.z1 * c.m1 * std::exp(c.m2 * q.sup_b) * r_m + q.z2 * lip * r_m +
             mbar * mbar * std::exp(c.m2 * q.sup_b) * std::exp(mbar * q.nbox) *
                 (c.m1 * c.m3 * q.sup_b + c.m4) * q.nbox / n;
    q.y_gap_bound = q.j_nm * t_hor * std::exp(q.z1 * t_hor);
    q.z5 = std::exp(c.m2 * q.sup_b);
    q.z6 = mbar * mbar * q.nbox * std::exp(mbar * q.nbox);
    q.x_gap_bound = q.z5 * q.y_gap_bound + q.z6 / n;
    return q;
}

std::vector<BoundReport> check_y_bounds(const CoefficientSet& c, int n, int m,
                                        const DriverPath& driver) {
    if (!driver.params) throw std::invalid_argument("check_y_bounds: transport driver required");
    ApproxParams p = *driver.params;
    if (p.n != n) throw std::invalid_argument("check_y_bounds: n differs from the driver's");
    const ProofQuantities q = proof_quantities(c, p, m, driver);

    const SolutionPath ye = euler_drift_path(c, n, m, driver);
    double y_sup = 0.0;
    for (double v : ye.y) y_sup = std::max(y_sup, std::abs(v));

    const SolutionPath yr = solve_drift_ode(c, driver, p.horizon / m);
    double gap = 0.0;
    for (std::size_t i = 0; i < ye.y.size(); ++i)
        gap = std::max(gap, std::abs(ye.y[i] - yr.y[i]));

    std::ostringstream ctx;
    ctx << "n=" << n << " m=" << m << " supB=" << q.sup_b << " khat=" << q.khat << " Z1=" << q.z1
        << " Z2=" << q.z2 << " N=" << q.nbox << " J=" << q.j_nm;

    BoundReport env;
    env.name = "euler-path-envelope";
    env.measured = y_sup;
    env.bound = q.y_sup_bound;
    env.context = ctx.str();

    BoundReport gapr;
    gapr.name = "euler-reference-gap";
    gapr.measured = gap;
    gapr.bound = q.y_gap_bound;
    gapr.context = ctx.str();

    return {env, gapr};
}

CovarianceResult covariance_experiment(const CovarianceConfig& cfg) {
    if (cfg.replicas < 1) throw std::invalid_argument("covariance: need at least one replica");
    cfg.params.validate();
    const std::size_t k = cfg.grid.size();
    if (k == 0) throw std::invalid_argument("covariance: empty grid");
    for (double t : cfg.grid)
        if (!(t > 0.0) || t > cfg.params.horizon)
            throw std::invalid_argument("covariance: grid times must lie in (0, T]");

    const std::size_t reps = static_cast<std::size_t>(cfg.replicas);
    std::vector<double> vals(reps * k);
    std::exception_ptr fail = nullptr;
#pragma omp parallel for schedule(dynamic)
    for (long r = 0; r < static_cast<long>(reps); ++r) {
        try {
            std::vector<double> grid = cfg.grid;
            const DriverPath d = make_transport_driver(
                cfg.params, grid, {cfg.master_seed, static_cast<std::uint64_t>(r)}, cfg.mode);
            // driver grid is {0} + cfg.grid
            for (std::size_t j = 0; j < k; ++j)
                vals[static_cast<std::size_t>(r) * k + j] = d.values[j + 1];
        } catch (...) {
#pragma omp critical(cov_fail)
            if (!fail) fail = std::current_exception();
        }
    }
    if (fail) std::rethrow_exception(fail);

    CovarianceResult out;
    out.emp.resize(k * k);
    out.exact.resize(k * k);
    out.se.resize(k * k);
    double worst_excess = -std::numeric_limits<double>::infinity();
    std::size_t worst_i = 0, worst_j = 0;
    std::vector<double> prod(reps);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i; j < k; ++j) {
            for (std::size_t r = 0; r < reps; ++r) prod[r] = vals[r * k + i] * vals[r * k + j];
            const double mean = pairwise_sum(prod) / static_cast<double>(reps);
            double var = 0.0;
            for (std::size_t r = 0; r < reps; ++r) {
                const double d = prod[r] - mean;
                var += d * d;
            }
            var /= std::max<std::size_t>(1, reps - 1);
            const double se = std::sqrt(var / static_cast<double>(reps));
            const double exact = fbm_covariance(cfg.params.hurst, cfg.grid[i], cfg.grid[j]);
            out.emp[i * k + j] = out.emp[j * k + i] = mean;
            out.exact[i * k + j] = out.exact[j * k + i] = exact;
            out.se[i * k + j] = out.se[j * k + i] = se;
            const double err = std::abs(mean - exact);
            out.max_abs_err = std::max(out.max_abs_err, err);
            const double tol = cfg.se_mult * se + cfg.bias_allowance;
            if (err - tol > worst_excess) {
                worst_excess = err - tol;
                worst_i = i;
                worst_j = j;
            }
        }
    }
    BoundReport r;
    r.name = "covariance-mc";
    r.measured = worst_excess;
    r.bound = 0.0;
    std::ostringstream os;
    os << "H=" << cfg.params.hurst << " n=" << cfg.params.n << " replicas=" << cfg.replicas
       << " max|err|=" << out.max_abs_err << " worst entry (" << cfg.grid[worst_i] << ","
       << cfg.grid[worst_j] << "), tol = " << cfg.se_mult << "*SE + " << cfg.bias_allowance;
    r.context = os.str();
    out.report = std::move(r);
    return out;
}

ConvergenceResult convergence_experiment(const ConvergenceConfig& cfg) {
    if (cfg.ns.size() < 3)
        throw std::invalid_argument("convergence: sweep needs at least 3 values of n");
    if (cfg.replicas < 1) throw std::invalid_argument("convergence: need at least one replica");
    for (std::size_t i = 1; i < cfg.ns.size(); ++i)
        if (cfg.ns[i] <= cfg.ns[i - 1])
            throw std::invalid_argument("convergence: sweep must be strictly increasing");

    const std::size_t reps = static_cast<std::size_t>(cfg.replicas);
    const std::size_t kn = cfg.ns.size();
    std::vector<double> errs(kn * reps, 0.0);
    std::vector<double> bounds(kn * reps, 0.0);
    std::vector<double> khat(kn * reps, 0.0);

    for (std::size_t in = 0; in < kn; ++in) {
        const int n = cfg.ns[in];
        ApproxParams params = cfg.base;
        params.n = n;
        params.validate();
        const int m = n * n;
        const std::vector<double> grid = uniform_grid(params.horizon, m);
        std::exception_ptr fail = nullptr;
#pragma omp parallel for schedule(dynamic)
        for (long r = 0; r < static_cast<long>(reps); ++r) {
            try {
                const DriverPath driver = make_transport_driver(
                    params, grid, {cfg.master_seed, static_cast<std::uint64_t>(r)});
                const SolutionPath y_euler = euler_drift_path(cfg.coeffs, n, m, driver);
                const SolutionPath x_euler =
                    compose_with_grid(EulerFlowGrid(cfg.coeffs, n), y_euler, driver);
                const SolutionPath y_ref = solve_drift_ode(cfg.coeffs, driver, params.horizon / m);
                const SolutionPath x_tilde = compose_with_flow(FlowMap(cfg.coeffs), y_ref, driver);
                const double err = sup_norm_diff(x_tilde, x_euler);
                const std::size_t idx = in * reps + static_cast<std::size_t>(r);
                errs[idx] = err;
                khat[idx] = lipschitz_ratio(driver);
                if (cfg.pathwise_bound)
                    bounds[idx] = proof_quantities(cfg.coeffs, params, m, driver).x_gap_bound;
            } catch (...) {
#pragma omp critical(conv_fail)
                if (!fail) fail = std::current_exception();
            }
        }
        if (fail) std::rethrow_exception(fail);
    }

    ConvergenceResult out;
    std::vector<double> means(kn);
    for (std::size_t in = 0; in < kn; ++in) {
        std::vector<double> row(errs.begin() + static_cast<long>(in * reps),
                                errs.begin() + static_cast<long>((in + 1) * reps));
        RateRow rr;
        rr.n = cfg.ns[in];
        rr.replicas = cfg.replicas;
        rr.mean_err = pairwise_sum(row) / static_cast<double>(reps);
        rr.median_err = median_of(row);
        rr.max_err = *std::max_element(row.begin(), row.end());
        means[in] = rr.mean_err;
        out.table.rows.push_back(rr);
        double kmax = 0.0;
        for (std::size_t r = 0; r < reps; ++r) kmax = std::max(kmax, khat[in * reps + r]);
        out.khat.push_back(kmax);
        if (cfg.pathwise_bound) {
            for (std::size_t r = 0; r < reps; ++r) {
                BoundReport b;
                std::ostringstream nm;
                nm << "composition-gap[n=" << cfg.ns[in] << ",rep=" << r << "]";
                b.name = nm.str();
                b.measured = errs[in * reps + r];
                b.bound = bounds[in * reps + r];
                std::ostringstream cx;
                cx << "normalized err*n^{1-beta}="
                   << errs[in * reps + r] * std::pow(cfg.ns[in], 1.0 - cfg.base.beta);
                b.context = cx.str();
                out.pathwise.push_back(std::move(b));
            }
        }
    }
    std::vector<double> nd(cfg.ns.begin(), cfg.ns.end());
    out.table.fit = rate_fit(std::span<const double>(nd), std::span<const double>(means));
    return out;
}

std::vector<double> lipschitz_sweep(const ApproxParams& base, const std::vector<int>& ns,
                                    int replicas, std::uint64_t master_seed) {
    std::vector<double> out;
    out.reserve(ns.size());
    for (int n : ns) {
        ApproxParams p = base;
        p.n = n;
        p.validate();
        const std::vector<double> grid = uniform_grid(p.horizon, n * n);
        double kmax = 0.0;
        std::exception_ptr fail = nullptr;
#pragma omp parallel for schedule(dynamic) reduction(max : kmax)
        for (long r = 0; r < replicas; ++r) {
            try {
                const DriverPath d =
                    make_transport_driver(p, grid, {master_seed, static_cast<std::uint64_t>(r)});
                kmax = std::max(kmax, lipschitz_ratio(d));
            } catch (...) {
#pragma omp critical(sweep_fail)
                if (!fail) fail = std::current_exception();
            }
        }
        if (fail) std::rethrow_exception(fail);
        out.push_back(kmax);
    }
    return out;
}

double ks_statistic_normal(std::vector<double> samples) {
    if (samples.empty()) throw std::invalid_argument("ks: empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = 0.5 * std::erfc(-samples[i] / std::numbers::sqrt2);
        const double hi = (static_cast<double>(i) + 1.0) / n - f;
        const double lo = f - static_cast<double>(i) / n;
        d = std::max({d, hi, lo});
    }
    return d;
}

double ks_critical(double alpha, std::size_t n) {
    return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

} // namespace fbmtp
