#include "fbmtp/doss.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "fbmtp/io.hpp"
#include "fbmtp/ode.hpp"

namespace fbmtp {

FlowMap::FlowMap(const CoefficientSet& c, double rel_tol) : coeffs_(c), rel_tol_(rel_tol) {
    if (!(rel_tol > 0.0)) throw std::invalid_argument("flow map: tolerance must be positive");
}

double FlowMap::Result::dx() const { return std::exp(log_dx); }

FlowMap::Result FlowMap::solve(double x, double y) const {
    if (y == 0.0) return {x, 0.0};
    auto deriv = [this](const std::array<double, 2>& s) {
        return std::array<double, 2>{coeffs_.sigma(s[0]), coeffs_.dsigma(s[0])};
    };
    const std::array<double, 2> out =
        dopri5_integrate<2>(deriv, {x, 0.0}, 0.0, y, rel_tol_, 1e-13);
    return {out[0], out[1]};
}

EulerFlowGrid::EulerFlowGrid(const CoefficientSet& c, int n) : coeffs_(c), n_(n) {
    if (n < 1) throw std::invalid_argument("grid flow: level must be a positive integer");
}

double EulerFlowGrid::value(double x, double y) const {
    const double n = static_cast<double>(n_);
    if (std::abs(x) > n || std::abs(y) > n) return 0.0;
    const double r = 1.0 / n;
    const double dir = y >= 0.0 ? 1.0 : -1.0;
    const long k = static_cast<long>(std::floor(std::abs(y) * n));
    double v = x;
    for (long i = 0; i < k; ++i) v += dir * r * coeffs_.sigma(v);
    const double rem = y - dir * static_cast<double>(k) * r;
    return v + rem * coeffs_.sigma(v);
}

double effective_drift(const FlowMap& flow, double x, double y) {
    const FlowMap::Result r = flow.solve(x, y);
    return std::exp(-r.log_dx) * flow.coeffs().b(r.value);
}

double effective_drift_euler(const EulerFlowGrid& grid, double x, double y) {
    const CoefficientSet& c = grid.coeffs();
    const double n = static_cast<double>(grid.level());
    if (std::abs(x) > n) {
        // the grid flow is identically zero out there
        return std::exp(-c.dsigma(0.0) * y) * c.b(0.0);
    }
    const double r = 1.0 / n;
    const double dir = y >= 0.0 ? 1.0 : -1.0;
    const double y_inside = std::min(std::abs(y), n);
    const long k = static_cast<long>(std::floor(y_inside * n));
    double v = x;
    double expo = 0.0; // int_0^y sigma'(h_grid(x,u)) du, Simpson per cell
    for (long i = 0; i < k; ++i) {
        const double s = c.sigma(v);
        const double v_mid = v + dir * (0.5 * r) * s;
        const double v_next = v + dir * r * s;
        expo += dir * (r / 6.0) * (c.dsigma(v) + 4.0 * c.dsigma(v_mid) + c.dsigma(v_next));
        v = v_next;
    }
    const double rem = dir * (y_inside - static_cast<double>(k) * r);
    double v_end = v;
    if (rem != 0.0) {
        const double s = c.sigma(v);
        const double v_mid = v + 0.5 * rem * s;
        v_end = v + rem * s;
        expo += (rem / 6.0) * (c.dsigma(v) + 4.0 * c.dsigma(v_mid) + c.dsigma(v_end));
    }
    if (std::abs(y) > n) {
        // beyond the square the grid flow vanishes
        expo += (y - dir * n) * c.dsigma(0.0);
        v_end = 0.0;
    }
    return std::exp(-expo) * c.b(v_end);
}

std::string SolutionPath::tag() const {
    std::ostringstream os;
    switch (prov) {
        case Provenance::reference_y: os << "reference-Y"; break;
        case Provenance::euler_y: os << "euler-Y(" << n << ',' << m << ")"; break;
        case Provenance::x_exact_h: os << "X-exact-h"; break;
        case Provenance::x_euler: os << "X-euler"; break;
        case Provenance::x_tilde: os << "X-tilde"; break;
    }
    return os.str();
}

void SolutionPath::write_csv(std::ostream& os) const {
    os << "# provenance=" << tag() << '\n';
    os << "t,Y,X\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        os << fmt_full(grid[i]) << ',' << fmt_full(y[i]) << ',';
        if (!x.empty()) os << fmt_full(x[i]);
        os << '\n';
    }
}

namespace {

void validate_for_solve(const CoefficientSet& c, const DriverPath& driver) {
    const double span = 2.0 + std::abs(c.x0) +
                        driver.horizon() * c.m1 * std::exp(c.m2 * driver.sup_abs()) +
                        driver.sup_abs();
    const double lim = std::min(span, 1e6);
    const BoundReport r = validate_coeffs(c, -lim, lim, 512);
    if (!r.pass())
        throw std::invalid_argument("coefficient bounds violated: " + r.context);
}

} // namespace

SolutionPath solve_drift_ode(const CoefficientSet& c, const DriverPath& driver, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("solve: step must be positive");
    const double horizon = driver.horizon();
    const double steps_real = horizon / step;
    const long steps = std::lround(steps_real);
    if (steps < 1 || std::abs(steps_real - static_cast<double>(steps)) > 1e-9 * steps_real)
        throw std::invalid_argument("solve: step must divide the horizon");
    validate_for_solve(c, driver);

    const FlowMap flow(c);
    auto f = [&](double t, double yv) { return effective_drift(flow, yv, driver.value_at(t)); };

    SolutionPath out;
    out.prov = Provenance::reference_y;
    out.m = static_cast<int>(steps);
    out.grid.resize(static_cast<std::size_t>(steps) + 1);
    out.y.resize(out.grid.size());
    double yv = c.x0;
    out.grid[0] = 0.0;
    out.y[0] = yv;
    for (long k = 0; k < steps; ++k) {
        const double t = horizon * k / steps;
        const double t_next = horizon * (k + 1) / steps;
        const double h = t_next - t;
        const double k1 = f(t, yv);
        const double k2 = f(t + 0.5 * h, yv + 0.5 * h * k1);
        const double k3 = f(t + 0.5 * h, yv + 0.5 * h * k2);
        const double k4 = f(t_next, yv + h * k3);
        yv += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.grid[static_cast<std::size_t>(k) + 1] = t_next;
        out.y[static_cast<std::size_t>(k) + 1] = yv;
    }
    return out;
}

SolutionPath euler_drift_path(const CoefficientSet& c, int n, int m, const DriverPath& driver) {
    if (m < 1) throw std::invalid_argument("euler path: m must be a positive integer");
    const EulerFlowGrid grid_flow(c, n);
    const double horizon = driver.horizon();

    SolutionPath out;
    out.prov = Provenance::euler_y;
    out.n = n;
    out.m = m;
    out.grid.resize(static_cast<std::size_t>(m) + 1);
    out.y.resize(out.grid.size());
    double yv = c.x0;
    out.grid[0] = 0.0;
    out.y[0] = yv;
    const double r_m = horizon / m;
    for (int k = 0; k < m; ++k) {
        const double t = horizon * k / m;
        yv += r_m * effective_drift_euler(grid_flow, yv, driver.value_at(t));
        out.grid[static_cast<std::size_t>(k) + 1] = horizon * (k + 1) / m;
        out.y[static_cast<std::size_t>(k) + 1] = yv;
    }
    return out;
}

namespace {

void check_same_grid(const SolutionPath& y, const DriverPath& driver) {
    if (y.grid.size() != driver.grid.size())
        throw std::invalid_argument("compose: solution and driver grids differ");
    for (std::size_t i = 0; i < y.grid.size(); ++i)
        if (std::abs(y.grid[i] - driver.grid[i]) > 1e-12)
            throw std::invalid_argument("compose: solution and driver grids differ");
}

} // namespace

SolutionPath compose_with_flow(const FlowMap& flow, const SolutionPath& y,
                               const DriverPath& driver) {
    check_same_grid(y, driver);
    SolutionPath out = y;
    out.x.resize(y.grid.size());
    for (std::size_t i = 0; i < y.grid.size(); ++i)
        out.x[i] = flow.solve(y.y[i], driver.values[i]).value;
    out.prov = (y.prov == Provenance::reference_y && driver.kind == DriverKind::transport_approx)
                   ? Provenance::x_tilde
                   : Provenance::x_exact_h;
    return out;
}

SolutionPath compose_with_grid(const EulerFlowGrid& grid, const SolutionPath& y,
                               const DriverPath& driver) {
    check_same_grid(y, driver);
    SolutionPath out = y;
    out.x.resize(y.grid.size());
    for (std::size_t i = 0; i < y.grid.size(); ++i)
        out.x[i] = grid.value(y.y[i], driver.values[i]);
    out.prov = Provenance::x_euler;
    out.n = grid.level();
    return out;
}

} // namespace fbmtp
