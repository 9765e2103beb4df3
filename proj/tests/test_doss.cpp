#include <doctest.h>

#include <cmath>
#include <initializer_list>
#include <sstream>

#include "fbmtp/analysis.hpp"
#include "fbmtp/doss.hpp"

using namespace fbmtp;

namespace {

DriverPath zero_driver(int m, double horizon = 1.0) {
    DriverPath d;
    d.grid = uniform_grid(horizon, m);
    d.values.assign(d.grid.size(), 0.0);
    d.kind = DriverKind::exact_fbm;
    d.hurst = 0.5;
    return d;
}

DriverPath transport_driver(double hurst, int n, int m, std::uint64_t seed) {
    ApproxParams p;
    p.hurst = hurst;
    p.beta = hurst > 0.5 ? 0.3 : 0.25;
    p.delta = 0.05;
    p.n = n;
    return make_transport_driver(p, uniform_grid(p.horizon, m), {seed, 0});
}

} // namespace

TEST_CASE("coefficient bound validation") {
    CoefficientSet sin_only;
    sin_only.sigma = [](double x) { return std::sin(x); };
    sin_only.dsigma = [](double x) { return std::cos(x); };
    sin_only.ddsigma = [](double x) { return -std::sin(x); };
    sin_only.b = [](double) { return 0.0; };
    sin_only.db = [](double) { return 0.0; };
    sin_only.m1 = 0;
    sin_only.m2 = 1;
    sin_only.m3 = 1;
    sin_only.m4 = 0;
    sin_only.m5 = 1;
    CHECK(validate_coeffs(sin_only, -6.0, 6.0, 512).pass());

    CoefficientSet runaway = sin_only;
    runaway.sigma = [](double x) { return x; };
    runaway.dsigma = [](double) { return 1.0; };
    runaway.ddsigma = [](double) { return 0.0; };
    const BoundReport r = validate_coeffs(runaway, -2.0, 2.0, 101);
    CHECK_FALSE(r.pass());
    CHECK(r.measured == doctest::Approx(1.0)); // max|sigma| = 2 vs cap 1
    CHECK(r.context.find("VIOLATED") != std::string::npos);

    CHECK(validate_coeffs(preset_arctan(), -25.0, 25.0, 4096).pass());
    CHECK(validate_coeffs(preset_sin_cos(), -6.0, 6.0, 512).pass());
    CHECK(validate_coeffs(preset_linear(0.25, 0.5), -6.0, 6.0, 512).pass());
}

TEST_CASE("flow map: constant diffusion is exact") {
    const CoefficientSet lin = preset_linear(0.0, 0.7);
    const FlowMap flow(lin);
    for (double x : {-1.0, 0.3, 2.0})
        for (double y : {-2.0, -0.5, 0.0, 1.5}) {
            const FlowMap::Result r = flow.solve(x, y);
            CHECK(r.value == doctest::Approx(x + 0.7 * y).epsilon(1e-12));
            CHECK(r.dx() == doctest::Approx(1.0).epsilon(1e-12));
        }
}

TEST_CASE("flow map: sine diffusion matches its closed form") {
    const FlowMap flow(preset_sin_cos());
    // tan(h/2) = tan(x/2) e^y
    for (double x : {0.4, 1.0, 2.2})
        for (double y : {-1.0, -0.3, 0.5, 1.2}) {
            const double closed = 2.0 * std::atan(std::tan(0.5 * x) * std::exp(y));
            CHECK(flow.solve(x, y).value == doctest::Approx(closed).epsilon(1e-9));
        }
    // sigma(0) = 0 is a fixed point
    for (double y : {-2.0, 0.7, 3.0}) CHECK(flow.solve(0.0, y).value == 0.0);
}

TEST_CASE("x-sensitivity equals exp of the integrated slope (finite differences)") {
    const FlowMap flow(preset_sin_cos(), 1e-11);
    const double h = 1e-6;
    for (double x : {-1.3, 0.4, 1.7})
        for (double y : {-1.5, -0.4, 0.8, 2.0}) {
            const double fd =
                (flow.solve(x + h, y).value - flow.solve(x - h, y).value) / (2.0 * h);
            const double an = flow.solve(x, y).dx();
            CHECK(fd == doctest::Approx(an).epsilon(1e-5));
        }
}

TEST_CASE("grid flow: exactness for constant diffusion and the hand recursion") {
    const EulerFlowGrid lin(preset_linear(0.0, 0.7), 4);
    for (double x : {-3.0, 0.5, 2.0})
        for (double y : {-3.5, -1.0, 0.0, 2.25, 4.0})
            CHECK(lin.value(x, y) == doctest::Approx(x + 0.7 * y).epsilon(1e-13));

    // explicit two-step recursion, sine diffusion, level 2 at (1, 1)
    const EulerFlowGrid g2(preset_sin_cos(), 2);
    const double v1 = 1.0 + 0.5 * std::sin(1.0);
    const double v2 = v1 + 0.5 * std::sin(v1);
    CHECK(v1 == doctest::Approx(1.4207354924039484).epsilon(1e-14));
    CHECK(g2.value(1.0, 1.0) == doctest::Approx(v2).epsilon(1e-14));
    CHECK(g2.value(1.0, 1.0) == doctest::Approx(1.91512).epsilon(1e-4));

    // zero outside the closed square
    CHECK(g2.value(3.0, 0.0) == 0.0);
    CHECK(g2.value(0.0, 2.5) == 0.0);
    CHECK(g2.value(2.0, 2.0) != 0.0); // boundary of the closed square still evaluates
}

TEST_CASE("effective drift: closed cases and grid consistency") {
    const CoefficientSet lin = preset_linear(0.4, 0.7);
    const FlowMap flow(lin);
    CHECK(effective_drift(flow, 0.3, 1.2) == doctest::Approx(0.4).epsilon(1e-12));

    CoefficientSet none = preset_sin_cos();
    none.b = [](double) { return 0.0; };
    none.db = [](double) { return 0.0; };
    none.m1 = 0;
    none.m4 = 0;
    CHECK(effective_drift(FlowMap(none), 0.7, -0.9) == 0.0);

    const CoefficientSet sc = preset_sin_cos();
    const double exact = effective_drift(FlowMap(sc), 1.0, 0.5);
    const double euler = effective_drift_euler(EulerFlowGrid(sc, 64), 1.0, 0.5);
    CHECK(std::abs(exact - euler) < 5e-3);
}

TEST_CASE("reference Y solve: degenerate drifts and step refinement") {
    const DriverPath d = transport_driver(0.75, 8, 100, 51);

    CoefficientSet no_drift = preset_sin_cos();
    no_drift.b = [](double) { return 0.0; };
    no_drift.db = [](double) { return 0.0; };
    no_drift.m1 = 0;
    no_drift.m4 = 0;
    no_drift.x0 = 0.1;
    const SolutionPath y0 = solve_drift_ode(no_drift, d, 0.01);
    for (double v : y0.y) CHECK(v == doctest::Approx(0.1).epsilon(1e-14));

    const CoefficientSet lin = preset_linear(0.25, 0.5, 0.1);
    const SolutionPath ylin = solve_drift_ode(lin, d, 0.01);
    for (std::size_t i = 0; i < ylin.grid.size(); ++i)
        CHECK(ylin.y[i] == doctest::Approx(0.1 + 0.25 * ylin.grid[i]).epsilon(1e-12));

    // halving the step barely moves the sine/cosine solution
    const CoefficientSet sc = preset_sin_cos();
    const SolutionPath ya = solve_drift_ode(sc, d, 1e-3);
    const SolutionPath yb = solve_drift_ode(sc, d, 5e-4);
    double worst = 0.0;
    for (std::size_t i = 0; i < ya.grid.size(); ++i)
        worst = std::max(worst, std::abs(ya.y[i] - yb.y[2 * i]));
    CHECK(worst < 1e-6);

    CHECK_THROWS_AS(solve_drift_ode(sc, d, 0.013), std::invalid_argument);
}

TEST_CASE("euler Y chain: degenerate drifts and the sup envelope") {
    const DriverPath d = transport_driver(0.75, 8, 64, 52);

    CoefficientSet no_drift = preset_sin_cos();
    no_drift.b = [](double) { return 0.0; };
    no_drift.db = [](double) { return 0.0; };
    no_drift.m1 = 0;
    no_drift.m4 = 0;
    for (int n : {4, 8})
        for (int m : {16, 64}) {
            const SolutionPath y = euler_drift_path(no_drift, n, m, d);
            for (double v : y.y) CHECK(v == 0.1);
        }

    const CoefficientSet lin = preset_linear(0.25, 0.5, 0.1);
    const SolutionPath ylin = euler_drift_path(lin, 8, 64, d);
    for (std::size_t i = 0; i < ylin.grid.size(); ++i)
        CHECK(ylin.y[i] == doctest::Approx(0.1 + 0.25 * ylin.grid[i]).epsilon(1e-13));

    // runtime envelope |Y| <= |x0| + T M1 exp(M2 sup|B|)
    const CoefficientSet sc = preset_sin_cos();
    const SolutionPath y = euler_drift_path(sc, 8, 64, d);
    const double cap = 0.1 + 1.0 * std::exp(d.sup_abs());
    for (double v : y.y) CHECK(std::abs(v) <= cap);
}

TEST_CASE("composition: linear closed form and zero driver") {
    const CoefficientSet lin = preset_linear(0.25, 0.5, 0.1);
    const DriverPath d = transport_driver(0.75, 8, 64, 53);
    const SolutionPath y = euler_drift_path(lin, 8, 64, d);
    const SolutionPath x = compose_with_grid(EulerFlowGrid(lin, 8), y, d);
    for (std::size_t i = 0; i < x.grid.size(); ++i)
        CHECK(x.x[i] ==
              doctest::Approx(0.1 + 0.25 * x.grid[i] + 0.5 * d.values[i]).epsilon(1e-11));
    CHECK(x.tag() == "X-euler");

    const SolutionPath yf = solve_drift_ode(lin, d, 1.0 / 64);
    const SolutionPath xf = compose_with_flow(FlowMap(lin), yf, d);
    for (std::size_t i = 0; i < xf.grid.size(); ++i)
        CHECK(xf.x[i] ==
              doctest::Approx(0.1 + 0.25 * xf.grid[i] + 0.5 * d.values[i]).epsilon(1e-11));
    CHECK(xf.tag() == "X-tilde");

    CoefficientSet no_drift = preset_sin_cos();
    no_drift.b = [](double) { return 0.0; };
    no_drift.db = [](double) { return 0.0; };
    no_drift.m1 = 0;
    no_drift.m4 = 0;
    const DriverPath z = zero_driver(32);
    const SolutionPath yz = solve_drift_ode(no_drift, z, 1.0 / 32);
    const SolutionPath xz = compose_with_flow(FlowMap(no_drift), yz, z);
    for (double v : xz.x) CHECK(v == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(xz.tag() == "X-exact-h"); // exact driver, not a transport one
}

TEST_CASE("composition rejects mismatched grids") {
    const CoefficientSet sc = preset_sin_cos();
    const DriverPath d = transport_driver(0.75, 8, 64, 54);
    const SolutionPath y = euler_drift_path(sc, 8, 32, d);
    CHECK_THROWS_AS(compose_with_grid(EulerFlowGrid(sc, 8), y, d), std::invalid_argument);
}

TEST_CASE("same-driver compositions converge as the level doubles") {
    const CoefficientSet sc = preset_sin_cos();
    std::vector<int> ns{8, 16, 32};
    std::vector<double> errs;
    for (int n : ns) {
        const int m = n * n;
        double mean = 0.0;
        for (std::uint64_t seed = 808; seed < 812; ++seed) {
            const DriverPath d = transport_driver(0.75, n, m, seed);
            const SolutionPath ye = euler_drift_path(sc, n, m, d);
            const SolutionPath xe = compose_with_grid(EulerFlowGrid(sc, n), ye, d);
            const SolutionPath yr = solve_drift_ode(sc, d, 1.0 / m);
            const SolutionPath xt = compose_with_flow(FlowMap(sc), yr, d);
            mean += sup_norm_diff(xt, xe) / 4.0;
        }
        errs.push_back(mean);
    }
    CHECK(errs[1] < errs[0]);
    CHECK(errs[2] < errs[1]);
    const RateFit fit = rate_fit(ns, errs);
    CHECK(fit.slope <= -0.5);
}

TEST_CASE("solution csv carries the provenance tag") {
    const CoefficientSet lin = preset_linear(0.25, 0.5, 0.1);
    const DriverPath z = zero_driver(8);
    const SolutionPath y = euler_drift_path(lin, 4, 8, z);
    std::ostringstream os;
    y.write_csv(os);
    CHECK(os.str().find("# provenance=euler-Y(4,8)") != std::string::npos);
    CHECK(os.str().find("t,Y,X") != std::string::npos);
}
