// Acceptance suite: one line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "fbmtp/analysis.hpp"
#include "fbmtp/commands.hpp"
#include "fbmtp/doss.hpp"
#include "fbmtp/io.hpp"
#include "fbmtp/kernels.hpp"
#include "fbmtp/quadrature.hpp"

using namespace fbmtp;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, bool pass, double seconds, const std::string& detail) {
    std::printf("C%02d %s (%6.1fs) %s\n", id, pass ? "PASS" : "FAIL", seconds, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

template <class Fn>
void criterion(int id, Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = false;
    std::string detail;
    try {
        detail = fn(pass);
    } catch (const std::exception& e) {
        pass = false;
        detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(id, pass, secs, detail);
}

ApproxParams params_h(double hurst, int n) {
    ApproxParams p;
    p.hurst = hurst;
    p.beta = hurst > 0.5 ? 0.3 : 0.25;
    p.delta = 0.05;
    p.a = -1.0;
    p.n = n;
    p.horizon = 1.0;
    return p;
}

// Independent raw-kernel route for the unit-variance identity.
double identity_gap(double hurst) {
    const double p = hurst - 0.5;
    QuadOptions opt;
    opt.rel_tol = 1e-12;
    opt.abs_tol = 1e-14;
    const double ig = adaptive_simpson(
        [&](double u) { return std::exp(2.0 * hurst * u); }, -80.0 / (2.0 * hurst), 0.0, opt);
    const double if_near = adaptive_simpson(
        [&](double u) {
            const double x = std::exp(u);
            const double f = std::pow(1.0 + x, p) - std::pow(x, p);
            return f * f * x;
        },
        -75.0 / std::min(1.0, 2.0 * hurst), 0.0, opt);
    const double if_far = adaptive_simpson(
        [&](double u) {
            const double y = std::exp(u);
            const double d = std::expm1(p * std::log1p(y));
            return d * d * std::exp(-2.0 * hurst * u);
        },
        -75.0 / (2.0 - 2.0 * hurst), 0.0, opt);
    const double c = mvn_normalization(hurst);
    return std::abs(c * c * (if_near + if_far + ig) - 1.0);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace

int main() {
    std::printf("acceptance suite (transport-driven fractional SDE toolkit)\n");

    // 1. transport marginal law at rate 100
    criterion(1, [](bool& pass) {
        const auto t0 = std::chrono::steady_clock::now();
        const int replicas = 2000;
        std::vector<double> sample(replicas);
        for (int r = 0; r < replicas; ++r)
            sample[static_cast<std::size_t>(r)] =
                TransportPath::generate(100.0, 1.0, Orientation::forward,
                                        {20260808, static_cast<std::uint64_t>(r)})
                    .value_at(1.0);
        const double d = ks_statistic_normal(sample);
        const double crit = ks_critical(0.01, sample.size());
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        pass = d < crit && secs < 10.0;
        std::ostringstream os;
        os << "transport marginal vs N(0,1): KS=" << d << " < " << crit << ", runtime " << secs
           << "s < 10s";
        return os.str();
    });

    // 2. normalization: defining identity by quadrature + MC variance of B^n_1
    criterion(2, [](bool& pass) {
        double worst = 0.0;
        for (double hurst : {0.3, 0.6, 0.75}) worst = std::max(worst, identity_gap(hurst));
        const ApproxParams p = params_h(0.75, 50);
        const int replicas = 4000;
        std::vector<double> sq(replicas);
#pragma omp parallel for schedule(dynamic)
        for (int r = 0; r < replicas; ++r) {
            const DriverPath d = make_transport_driver(p, {0.0, 1.0},
                                                       {101, static_cast<std::uint64_t>(r)});
            sq[static_cast<std::size_t>(r)] = d.values.back() * d.values.back();
        }
        const double var = pairwise_sum(sq) / replicas;
        pass = worst < 1e-8 && std::abs(var - 1.0) < 0.1;
        std::ostringstream os;
        os << "variance identity gap " << worst << " < 1e-8 (H in {0.3,0.6,0.75}); MC var "
           << var << " within 0.1 of 1 (n=50, 4000 replicas)";
        return os.str();
    });

    // 3. covariance of the transport driver vs the fbm covariance
    criterion(3, [](bool& pass) {
        const auto t0 = std::chrono::steady_clock::now();
        double worst = 0.0;
        std::ostringstream os;
        os << "max entrywise |MC cov - exact|:";
        for (double hurst : {0.3, 0.75}) {
            CovarianceConfig cfg;
            cfg.params = params_h(hurst, 50);
            cfg.grid = {0.25, 0.5, 0.75, 1.0};
            cfg.replicas = 4000;
            cfg.master_seed = 303;
            const CovarianceResult res = covariance_experiment(cfg);
            worst = std::max(worst, res.max_abs_err);
            os << " H=" << hurst << ": " << res.max_abs_err;
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        pass = worst <= 0.1 && secs < 300.0;
        os << " (<= 0.1), runtime " << secs << "s < 300s";
        return os.str();
    });

    // 4. audited Lipschitz ratio shows no growth across the sweep
    criterion(4, [](bool& pass) {
        const std::vector<double> khat =
            lipschitz_sweep(params_h(0.75, 8), {8, 16, 32, 64}, 3, 404);
        const double lo = *std::min_element(khat.begin(), khat.end());
        const double hi = *std::max_element(khat.begin(), khat.end());
        pass = hi / lo < 10.0;
        std::ostringstream os;
        os << "khat over n in {8,16,32,64}:";
        for (double v : khat) os << ' ' << v;
        os << "; max/min " << hi / lo << " < 10";
        return os.str();
    });

    // 5. flow-map inequality suite + arctan floor, zero violations
    criterion(5, [](bool& pass) {
        const std::vector<BoundReport> rs = check_h_bounds(preset_sin_cos());
        const BoundReport floor = check_arctan_floor();
        int bad = 0;
        double worst = -1e300;
        for (const BoundReport& r : rs) {
            if (!r.pass()) ++bad;
            worst = std::max(worst, r.measured);
        }
        if (!floor.pass()) ++bad;
        pass = bad == 0;
        std::ostringstream os;
        os << "8 flow inequalities on a 32x32 grid + arctan floor: " << bad
           << " violations, worst excess " << worst;
        return os.str();
    });

    // 6. flow-grid error bound and order in the fine level
    criterion(6, [](bool& pass) {
        const CoefficientSet sc = preset_sin_cos();
        bool all = true;
        std::ostringstream os;
        os << "flow-grid error vs mbar^2 (n/l) e^{mbar n}:";
        for (const auto& [n, l] : {std::pair{1, 2}, std::pair{2, 4}, std::pair{2, 8}}) {
            const BoundReport r = check_h_euler_bound(sc, n, l);
            all = all && r.pass();
            os << " (" << n << ',' << l << "): " << r.measured << "<=" << r.bound;
        }
        std::vector<int> ls{4, 8, 16};
        std::vector<double> errs;
        for (int l : ls) errs.push_back(check_h_euler_bound(sc, 2, l).measured);
        const double order = -rate_fit(ls, errs).slope;
        all = all && order >= 0.9;
        os << "; order in l " << order << " >= 0.9";
        pass = all;
        return os.str();
    });

    // 7. pathwise Euler bounds on seeded drivers
    criterion(7, [](bool& pass) {
        const CoefficientSet sc = preset_sin_cos();
        int bad = 0, total = 0;
        for (const auto& [n, m] : {std::pair{8, 64}, std::pair{16, 256}}) {
            ApproxParams p = params_h(0.75, n);
            const std::vector<double> grid = uniform_grid(p.horizon, m);
            for (int s = 0; s < 10; ++s) {
                const DriverPath d =
                    make_transport_driver(p, grid, {707, static_cast<std::uint64_t>(s)});
                for (const BoundReport& r : check_y_bounds(sc, n, m, d)) {
                    ++total;
                    if (!r.pass()) ++bad;
                }
            }
        }
        pass = bad == 0;
        std::ostringstream os;
        os << "envelope and reference-gap bounds, (n,m) in {(8,64),(16,256)} x 10 seeds: " << bad
           << '/' << total << " violations";
        return os.str();
    });

    // 8. same-driver convergence of the two compositions
    criterion(8, [](bool& pass) {
        const auto t0 = std::chrono::steady_clock::now();
        ConvergenceConfig cfg;
        cfg.coeffs = preset_sin_cos();
        cfg.base = params_h(0.75, 8);
        cfg.ns = {8, 16, 32, 64};
        cfg.replicas = 20;
        cfg.master_seed = 808;
        const ConvergenceResult res = convergence_experiment(cfg);
        int bad = 0;
        for (const BoundReport& r : res.pathwise)
            if (!r.pass()) ++bad;
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        pass = res.table.fit.slope <= -0.5 && bad == 0 && secs < 600.0;
        std::ostringstream os;
        os << "sup|X-tilde - X-euler| slope " << res.table.fit.slope << " <= -0.5; " << bad
           << '/' << res.pathwise.size() << " pathwise bound violations; runtime " << secs
           << "s < 600s; means:";
        for (const RateRow& r : res.table.rows) os << " n=" << r.n << ":" << r.mean_err;
        return os.str();
    });

    // 9. exactness of the linear case
    criterion(9, [](bool& pass) {
        const CoefficientSet lin = preset_linear(0.25, 0.5, 0.1);
        const ApproxParams p = params_h(0.75, 8);
        const int m = 64;
        const DriverPath d = make_transport_driver(p, uniform_grid(1.0, m), {909, 0});
        const SolutionPath y = euler_drift_path(lin, p.n, m, d);
        const SolutionPath x = compose_with_grid(EulerFlowGrid(lin, p.n), y, d);
        double worst = 0.0, box = 0.0;
        for (std::size_t i = 0; i < x.grid.size(); ++i) {
            worst = std::max(worst,
                             std::abs(x.x[i] - (0.1 + 0.25 * x.grid[i] + 0.5 * d.values[i])));
            box = std::max({box, std::abs(y.y[i]), std::abs(d.values[i])});
        }
        pass = worst <= 1e-10 && box < p.n;
        std::ostringstream os;
        os << "sup|X-euler - (x0 + b0 t + c B)| = " << worst << " <= 1e-10 (arguments stay in ["
           << -p.n << ',' << p.n << "]^2: max " << box << ")";
        return os.str();
    });

    // 10. byte-identical CSV bodies under repeated runs
    criterion(10, [](bool& pass) {
        const fs::path root = fs::temp_directory_path() / "fbmtp_acceptance";
        fs::remove_all(root);
        Config gen;
        gen.set("kind", "both");
        gen.set("n", "12");
        gen.set("grid_points", "64");
        Config conv;
        conv.set("preset", "sin-cos");
        conv.set("n_sweep", "4,6,8");
        conv.set("replicas", "3");
        conv.set("cov_n", "12");
        conv.set("cov_replicas", "200");
        conv.set("bias_allowance", "0.3");
        bool ok = cmd_gen_fbm(gen, (root / "g1").string()) == 0 &&
                  cmd_gen_fbm(gen, (root / "g2").string()) == 0 &&
                  cmd_converge(conv, (root / "c1").string()) == 0 &&
                  cmd_converge(conv, (root / "c2").string()) == 0;
        int files = 0;
        if (ok) {
            for (const auto& entry : fs::directory_iterator(root / "g1")) {
                ++files;
                ok = ok && slurp(entry.path()) ==
                               slurp(root / "g2" / entry.path().filename());
            }
            for (const auto& entry : fs::directory_iterator(root / "c1")) {
                ++files;
                ok = ok && slurp(entry.path()) ==
                               slurp(root / "c2" / entry.path().filename());
            }
        }
        pass = ok && files > 0;
        std::ostringstream os;
        os << "repeated gen-fbm and converge runs byte-identical across " << files << " files";
        return os.str();
    });

    std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
    return failures == 0 ? 0 : 1;
}
