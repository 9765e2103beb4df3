#include "fbmtp/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "fbmtp/analysis.hpp"
#include "fbmtp/io.hpp"

namespace fbmtp {

namespace fs = std::filesystem;

namespace {

// Tracks emitted files so a failing command leaves no partial output behind.
class Emitter {
public:
    explicit Emitter(const std::string& dir) : dir_(dir) { fs::create_directories(dir_); }
    ~Emitter() {
        if (!committed_)
            for (const fs::path& p : written_) {
                std::error_code ec;
                fs::remove(p, ec);
            }
    }
    void write(const std::string& name, const std::string& body) {
        const fs::path p = dir_ / name;
        std::ofstream os(p, std::ios::binary);
        if (!os) throw std::runtime_error("cannot write " + p.string());
        os << body;
        written_.push_back(p);
    }
    void commit() { committed_ = true; }

private:
    fs::path dir_;
    std::vector<fs::path> written_;
    bool committed_ = false;
};

ApproxParams params_from(Config& cfg) {
    ApproxParams p;
    p.hurst = cfg.get_double("H", 0.75);
    const double def_beta = std::abs(p.hurst - 0.5) < 0.3 ? 0.3 : (std::abs(p.hurst - 0.5) + 0.5) / 2.0;
    p.beta = cfg.get_double("beta", def_beta);
    p.delta = cfg.get_double("delta", 0.05);
    p.a = cfg.get_double("a", -1.0);
    p.n = cfg.get_int("n", 50);
    p.horizon = cfg.get_double("T", 1.0);
    return p;
}

CoefficientSet coeffs_from(Config& cfg) {
    const std::string preset = cfg.get_string("preset", "sin-cos");
    const double b0 = cfg.get_double("b0", 0.25);
    const double c = cfg.get_double("c", 0.5);
    const double x0 = cfg.get_double("x0", 0.1);
    return coefficient_preset(preset, b0, c, x0);
}

int threads_from(Config& cfg) { return cfg.get_int("threads", 0); }

void apply_threads(int threads);

std::string solution_csv(const SolutionPath& s) {
    std::ostringstream os;
    s.write_csv(os);
    return os.str();
}

std::string driver_csv(const DriverPath& d) {
    std::ostringstream os;
    d.write_csv(os);
    return os.str();
}

} // namespace

} // namespace fbmtp

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fbmtp {
namespace {
void apply_threads(int threads) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}
} // namespace

int cmd_gen_fbm(Config cfg, const std::string& out_dir) {
    apply_threads(threads_from(cfg));
    const std::string kind = cfg.get_string("kind", "transport");
    if (kind != "transport" && kind != "exact" && kind != "both")
        throw ConfigError("gen-fbm: kind must be transport, exact or both");
    ApproxParams p = params_from(cfg);
    const int grid_points = cfg.get_int("grid_points", 256);
    const int replicas = cfg.get_int("replicas", 1);
    const std::uint64_t seed = cfg.get_u64("master_seed", 1);
    const bool dump_paths = cfg.get_bool("dump_paths", false);
    cfg.finish();
    if (replicas < 1) throw ConfigError("gen-fbm: replicas must be >= 1");
    if (grid_points < 1) throw ConfigError("gen-fbm: grid_points must be >= 1");

    Emitter out(out_dir);
    const std::vector<double> grid = uniform_grid(p.horizon, grid_points);
    for (int r = 0; r < replicas; ++r) {
        if (kind == "transport" || kind == "both") {
            p.validate();
            const std::uint64_t sr = static_cast<std::uint64_t>(r);
            const double rate = static_cast<double>(p.n);
            const TransportPath z1 =
                TransportPath::generate(rate, p.horizon, Orientation::forward, {seed, sr * 3});
            const TransportPath z2 =
                TransportPath::generate(rate, -p.a, Orientation::backward, {seed, sr * 3 + 1});
            const TransportPath z3 = TransportPath::generate(rate, -1.0 / p.a,
                                                             Orientation::backward, {seed, sr * 3 + 2});
            DriverPath d = build_transport_driver(p, z1, z2, z3, grid);
            d.seed = RngSeed{seed, sr};
            out.write("driver_transport_r" + std::to_string(r) + ".csv", driver_csv(d));
            if (dump_paths) {
                const TransportPath* zs[3] = {&z1, &z2, &z3};
                for (int j = 0; j < 3; ++j) {
                    std::ostringstream os;
                    zs[j]->write_csv(os);
                    out.write("transport_z" + std::to_string(j + 1) + "_r" + std::to_string(r) +
                                  ".csv",
                              os.str());
                }
            }
        }
        if (kind == "exact" || kind == "both") {
            const DriverPath d = exact_fbm(p.hurst, grid, {seed, static_cast<std::uint64_t>(r)});
            out.write("driver_exact_r" + std::to_string(r) + ".csv", driver_csv(d));
        }
    }
    out.commit();
    return 0;
}

int cmd_solve(Config cfg, const std::string& out_dir) {
    apply_threads(threads_from(cfg));
    ApproxParams p = params_from(cfg);
    const CoefficientSet coeffs = coeffs_from(cfg);
    const std::string driver_kind = cfg.get_string("driver", "transport");
    const int m = cfg.get_int("m", p.n * p.n);
    const std::uint64_t seed = cfg.get_u64("master_seed", 1);
    cfg.finish();
    if (m < 1) throw ConfigError("solve: m must be >= 1");

    const std::vector<double> grid = uniform_grid(p.horizon, m);
    DriverPath driver;
    if (driver_kind == "transport") {
        p.validate();
        driver = make_transport_driver(p, grid, {seed, 0});
    } else if (driver_kind == "exact") {
        driver = exact_fbm(p.hurst, grid, {seed, 0});
    } else {
        throw ConfigError("solve: driver must be transport or exact");
    }

    Emitter out(out_dir);
    out.write("driver.csv", driver_csv(driver));

    const SolutionPath y_ref = solve_drift_ode(coeffs, driver, p.horizon / m);
    const SolutionPath x_ref = compose_with_flow(FlowMap(coeffs), y_ref, driver);
    out.write("solution_x_tilde.csv", solution_csv(x_ref));

    const SolutionPath y_euler = euler_drift_path(coeffs, p.n, m, driver);
    const SolutionPath x_euler = compose_with_grid(EulerFlowGrid(coeffs, p.n), y_euler, driver);
    out.write("solution_x_euler.csv", solution_csv(x_euler));

    out.write("solution_y_reference.csv", solution_csv(y_ref));
    out.commit();
    return 0;
}

int cmd_validate(Config cfg, const std::string& out_dir) {
    apply_threads(threads_from(cfg));
    ApproxParams base = params_from(cfg);
    const CoefficientSet coeffs = coeffs_from(cfg);
    const int seeds = cfg.get_int("seeds", 3);
    const std::uint64_t seed = cfg.get_u64("master_seed", 1);
    cfg.finish();

    std::vector<BoundReport> reports;
    reports.push_back(validate_coeffs(coeffs, -8.0, 8.0, 2048));
    reports.push_back(validate_coeffs(preset_linear(0.25, 0.5), -8.0, 8.0, 2048));
    reports.push_back(validate_coeffs(preset_arctan(), -8.0, 8.0, 2048));

    // sigma' == 0 degenerates every flow inequality (and the Euler-gap bound)
    // to an exact equality at 0; those checks are meaningful for non-constant
    // diffusions only
    const bool degenerate = coeffs.m2 == 0.0;
    if (!degenerate)
        for (const BoundReport& r : check_h_bounds(coeffs)) reports.push_back(r);
    reports.push_back(check_arctan_floor());

    for (const auto& [n, l] : std::vector<std::pair<int, int>>{{1, 2}, {2, 4}, {2, 8}})
        reports.push_back(check_h_euler_bound(coeffs, n, l));

    if (!degenerate) {
        for (const auto& [n, m] : std::vector<std::pair<int, int>>{{8, 64}, {16, 256}}) {
            ApproxParams p = base;
            p.n = n;
            p.validate();
            const std::vector<double> grid = uniform_grid(p.horizon, m);
            for (int s = 0; s < seeds; ++s) {
                const DriverPath d =
                    make_transport_driver(p, grid, {seed, static_cast<std::uint64_t>(s)});
                for (BoundReport& r : check_y_bounds(coeffs, n, m, d)) {
                    r.name += "[n=" + std::to_string(n) + ",m=" + std::to_string(m) +
                              ",rep=" + std::to_string(s) + "]";
                    reports.push_back(std::move(r));
                }
            }
        }
    }

    {
        const std::vector<int> sweep{8, 16, 32, 64};
        const std::vector<double> khat = lipschitz_sweep(base, sweep, seeds, seed);
        const double lo = *std::min_element(khat.begin(), khat.end());
        const double hi = *std::max_element(khat.begin(), khat.end());
        BoundReport r;
        r.name = "lipschitz-ratio-trend";
        r.measured = hi / lo;
        r.bound = 10.0;
        std::ostringstream os;
        os << "khat over n in {8,16,32,64}:";
        for (double v : khat) os << ' ' << v;
        r.context = os.str();
        reports.push_back(std::move(r));
    }

    Emitter out(out_dir);
    out.write("reports.csv", reports_csv(reports));
    out.commit();
    int failures = 0;
    for (const BoundReport& r : reports)
        if (!r.pass()) {
            ++failures;
            std::cerr << "FAIL " << r.name << " measured=" << r.measured << " bound=" << r.bound
                      << '\n';
        }
    return failures == 0 ? 0 : 2;
}

int cmd_converge(Config cfg, const std::string& out_dir) {
    apply_threads(threads_from(cfg));
    ConvergenceConfig cc;
    cc.base = params_from(cfg);
    cc.coeffs = coeffs_from(cfg);
    cc.ns = cfg.get_int_list("n_sweep", {8, 16, 32, 64});
    cc.replicas = cfg.get_int("replicas", 20);
    cc.master_seed = cfg.get_u64("master_seed", 1);
    cc.pathwise_bound = cfg.get_bool("pathwise_bound", true);
    const bool svg = cfg.get_bool("svg", true);
    const bool cov = cfg.get_bool("cov_check", true);
    CovarianceConfig vc;
    vc.params = cc.base;
    vc.params.n = cfg.get_int("cov_n", 50);
    vc.grid = cfg.get_double_list("cov_grid", {0.25, 0.5, 0.75, 1.0});
    vc.replicas = cfg.get_int("cov_replicas", 2000);
    vc.master_seed = cc.master_seed + 1000003;
    vc.se_mult = cfg.get_double("se_mult", 3.0);
    vc.bias_allowance = cfg.get_double("bias_allowance", 0.05);
    cfg.finish();

    const ConvergenceResult res = convergence_experiment(cc);
    std::vector<BoundReport> reports = res.pathwise;
    if (cov) {
        const CovarianceResult cr = covariance_experiment(vc);
        reports.push_back(cr.report);
    }

    Emitter out(out_dir);
    out.write("rate_table.csv", rate_table_csv(res.table));
    out.write("reports.csv", reports_csv(reports));
    if (svg) out.write("rate_plot.svg", rate_table_svg(res.table, "same-driver composition gap"));
    out.commit();

    std::cout << "fitted slope " << res.table.fit.slope << " over";
    for (const RateRow& r : res.table.rows) std::cout << ' ' << r.n;
    std::cout << '\n';
    int failures = 0;
    for (const BoundReport& r : reports)
        if (!r.pass()) ++failures;
    return failures == 0 ? 0 : 2;
}

} // namespace fbmtp
