#include <doctest.h>

#include <cmath>
#include <initializer_list>
#include <sstream>

#include "fbmtp/analysis.hpp"
#include "fbmtp/fbm.hpp"
#include "fbmtp/kernels.hpp"

using namespace fbmtp;

namespace {

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

struct Triple {
    TransportPath z1, z2, z3;
};

Triple make_triple(const ApproxParams& p, RngSeed seed, bool flip = false) {
    const double rate = p.n;
    TransportPath z1 = TransportPath::generate(rate, p.horizon, Orientation::forward,
                                               {seed.master_seed, seed.stream_index * 3});
    TransportPath z2 = TransportPath::generate(rate, -p.a, Orientation::backward,
                                               {seed.master_seed, seed.stream_index * 3 + 1});
    TransportPath z3 = TransportPath::generate(rate, -1.0 / p.a, Orientation::backward,
                                               {seed.master_seed, seed.stream_index * 3 + 2});
    if (flip) {
        z1 = TransportPath(rate, -z1.initial_sign(), z1.gaps(), p.horizon, Orientation::forward);
        z2 = TransportPath(rate, -z2.initial_sign(), z2.gaps(), -p.a, Orientation::backward);
        z3 = TransportPath(rate, -z3.initial_sign(), z3.gaps(), -1.0 / p.a, Orientation::backward);
    }
    return {std::move(z1), std::move(z2), std::move(z3)};
}

} // namespace

TEST_CASE("parameter constraint chain is validated") {
    CHECK_NOTHROW(params_h(0.75, 8).validate());
    CHECK_NOTHROW(params_h(0.3, 8).validate());

    ApproxParams p = params_h(0.75, 8);
    p.hurst = 0.5;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = params_h(0.75, 8);
    p.beta = 0.2; // below |H - 1/2|
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = params_h(0.75, 8);
    p.delta = 0.31; // >= beta
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = params_h(0.75, 8);
    p.beta = 0.45;
    p.delta = 0.08; // beta + delta >= 1/2
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = params_h(0.75, 8);
    p.a = 0.5;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = params_h(0.75, 8);
    p.n = 1; // cutoff hits a = -1
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = params_h(0.75, 8);
    p.horizon = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("driver is zero at t = 0 and linear in the transport paths") {
    for (double hurst : {0.75, 0.3}) {
        const ApproxParams p = params_h(hurst, 12);
        const Triple t = make_triple(p, {31, 0});
        const Triple tf = make_triple(p, {31, 0}, true);
        const std::vector<double> grid = uniform_grid(1.0, 16);
        const DriverPath d = build_transport_driver(p, t.z1, t.z2, t.z3, grid);
        const DriverPath df = build_transport_driver(p, tf.z1, tf.z2, tf.z3, grid);
        CHECK(d.values.front() == 0.0);
        for (std::size_t i = 0; i < d.values.size(); ++i)
            CHECK(d.values[i] == doctest::Approx(-df.values[i]).epsilon(1e-12));
    }
}

TEST_CASE("fast and reference constructions agree in both regimes") {
    for (double hurst : {0.75, 0.3}) {
        const ApproxParams p = params_h(hurst, 16);
        const Triple t = make_triple(p, {7, 0});
        const std::vector<double> grid = uniform_grid(1.0, 33);
        const DriverPath fast = build_transport_driver(p, t.z1, t.z2, t.z3, grid, BuildMode::fast);
        const DriverPath ref =
            build_transport_driver(p, t.z1, t.z2, t.z3, grid, BuildMode::reference);
        CHECK(sup_norm_diff(fast, ref) < 1e-9);
    }
}

TEST_CASE("mismatched transport paths are rejected") {
    const ApproxParams p = params_h(0.75, 8);
    const Triple t = make_triple(p, {3, 0});
    // z1 with the wrong rate
    const TransportPath bad = TransportPath::generate(7.0, 1.0, Orientation::forward, {3, 0});
    CHECK_THROWS_AS(build_transport_driver(p, bad, t.z2, t.z3, uniform_grid(1.0, 4)),
                    std::invalid_argument);
    // z2 with the wrong orientation
    CHECK_THROWS_AS(build_transport_driver(p, t.z1, t.z1, t.z3, uniform_grid(1.0, 4)),
                    std::invalid_argument);
}

TEST_CASE("lipschitz certificate holds on the grid and the audit is typed") {
    const ApproxParams p = params_h(0.75, 16);
    const DriverPath d = make_transport_driver(p, uniform_grid(1.0, 128), {5, 0});
    REQUIRE(d.lipschitz.has_value());
    for (std::size_t i = 1; i < d.grid.size(); ++i)
        CHECK(std::abs(d.values[i] - d.values[i - 1]) <=
              (*d.lipschitz) * (d.grid[i] - d.grid[i - 1]) * (1.0 + 1e-12));
    const BoundReport audit = lipschitz_audit(d);
    CHECK(audit.pass());

    const DriverPath ex = exact_fbm(0.6, uniform_grid(1.0, 8), {5, 1});
    CHECK_THROWS_AS(lipschitz_audit(ex), std::invalid_argument);

    // a constant-zero driver audits to ratio 0
    DriverPath zero;
    zero.grid = uniform_grid(1.0, 16);
    zero.values.assign(zero.grid.size(), 0.0);
    zero.kind = DriverKind::transport_approx;
    zero.hurst = p.hurst;
    zero.params = p;
    CHECK(lipschitz_ratio(zero) == 0.0);
    CHECK(lipschitz_audit(zero).pass());
}

TEST_CASE("transport driver covariance approaches the fbm covariance") {
    CovarianceConfig cfg;
    cfg.params = params_h(0.75, 32);
    cfg.grid = {0.5, 1.0};
    cfg.replicas = 1200;
    cfg.master_seed = 424242;
    cfg.bias_allowance = 0.05;
    const CovarianceResult res = covariance_experiment(cfg);
    CHECK(res.report.pass());
    CHECK(res.max_abs_err < 0.15);
}

TEST_CASE("covariance error does not grow as n doubles (up to MC noise)") {
    double prev_err = -1.0, prev_se = 0.0;
    for (int n : {16, 32, 64, 128}) {
        CovarianceConfig cfg;
        cfg.params = params_h(0.75, n);
        cfg.grid = {0.5, 1.0};
        cfg.replicas = 600;
        cfg.master_seed = 99;
        const CovarianceResult res = covariance_experiment(cfg);
        double max_se = 0.0;
        for (double s : res.se) max_se = std::max(max_se, s);
        if (prev_err >= 0.0) CHECK(res.max_abs_err <= prev_err + 3.0 * std::max(max_se, prev_se));
        prev_err = res.max_abs_err;
        prev_se = max_se;
    }
}

TEST_CASE("exact fbm sampler: marginal law, covariance, independence at H=1/2") {
    // single-point grid: standard normal marginal
    std::vector<double> sample(2000);
    for (std::size_t r = 0; r < sample.size(); ++r)
        sample[r] = exact_fbm(0.75, {1.0}, {611, r}).values.back();
    CHECK(ks_statistic_normal(sample) < ks_critical(0.01, sample.size()));

    // empirical covariance on a 4-point grid within 3 standard errors
    const std::vector<double> grid{0.25, 0.5, 0.75, 1.0};
    const int reps = 5000;
    std::vector<double> acc(16, 0.0), acc2(16, 0.0);
    for (int r = 0; r < reps; ++r) {
        const DriverPath d = exact_fbm(0.6, grid, {12345, static_cast<std::uint64_t>(r)});
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                const double v = d.values[i + 1] * d.values[j + 1];
                acc[i * 4 + j] += v;
                acc2[i * 4 + j] += v * v;
            }
    }
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const double mean = acc[i * 4 + j] / reps;
            const double var = acc2[i * 4 + j] / reps - mean * mean;
            const double se = std::sqrt(var / reps);
            const double exact = fbm_covariance(0.6, grid[i], grid[j]);
            CHECK(std::abs(mean - exact) < 3.0 * se + 1e-9);
        }

    // H = 1/2: increments over disjoint intervals are uncorrelated
    double cross = 0.0;
    const int reps2 = 4000;
    for (int r = 0; r < reps2; ++r) {
        const DriverPath d = exact_fbm(0.5, {0.5, 1.0}, {777, static_cast<std::uint64_t>(r)});
        cross += d.values[1] * (d.values[2] - d.values[1]);
    }
    CHECK(std::abs(cross / reps2) < 3.0 * 0.5 / std::sqrt(static_cast<double>(reps2)));
}

TEST_CASE("exact fbm input guards") {
    CHECK_THROWS_AS(exact_fbm(0.6, {0.5, 0.5, 1.0}, {1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(exact_fbm(1.2, {1.0}, {1, 0}), std::invalid_argument);
    std::vector<double> big(5000);
    for (std::size_t i = 0; i < big.size(); ++i) big[i] = 1e-3 * static_cast<double>(i + 1);
    CHECK_THROWS_AS(exact_fbm(0.6, big, {1, 0}), std::invalid_argument);
}

TEST_CASE("drivers serialize deterministically with metadata") {
    const ApproxParams p = params_h(0.3, 10);
    const DriverPath d1 = make_transport_driver(p, uniform_grid(1.0, 32), {77, 3});
    const DriverPath d2 = make_transport_driver(p, uniform_grid(1.0, 32), {77, 3});
    std::ostringstream a, b;
    d1.write_csv(a);
    d2.write_csv(b);
    CHECK(a.str() == b.str());
    CHECK(a.str().find("# kind=transport-approx") != std::string::npos);
    CHECK(a.str().find("# seed=77/3") != std::string::npos);
}

TEST_CASE("driver interpolation between grid nodes is linear") {
    DriverPath d;
    d.grid = {0.0, 0.5, 1.0};
    d.values = {0.0, 1.0, 0.0};
    d.kind = DriverKind::exact_fbm;
    d.hurst = 0.5;
    CHECK(d.value_at(0.25) == doctest::Approx(0.5));
    CHECK(d.value_at(0.75) == doctest::Approx(0.5));
    CHECK(d.value_at(0.5) == 1.0);
    CHECK_THROWS_AS(d.value_at(1.5), std::domain_error);
}
