#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fbmtp/coefficients.hpp"
#include "fbmtp/fbm.hpp"

namespace fbmtp {

/// Flow map of the noise direction: value(x, y) solves dh/dy = sigma(h),
/// h(x, 0) = x, integrated together with the x-sensitivity exponent
/// I(x, y) = int_0^y sigma'(h(x, u)) du, so that dh/dx = exp(I).
class FlowMap {
public:
    explicit FlowMap(const CoefficientSet& c, double rel_tol = 1e-10);

    struct Result {
        double value;       // h(x, y)
        double log_dx;      // I(x, y)
        double dx() const;  // exp(I)
    };
    Result solve(double x, double y) const;

    const CoefficientSet& coeffs() const { return coeffs_; }
    double rel_tol() const { return rel_tol_; }

private:
    CoefficientSet coeffs_;
    double rel_tol_;
};

/// First-order grid approximation of the flow map on [-n, n]^2 with step
/// 1/n, linear interpolation between grid levels in y, and value 0 outside
/// the closed square. Values are recomputed per call; x is a continuum
/// argument so no tabulation happens.
class EulerFlowGrid {
public:
    EulerFlowGrid(const CoefficientSet& c, int n);
    double value(double x, double y) const;
    int level() const { return n_; }
    const CoefficientSet& coeffs() const { return coeffs_; }

private:
    CoefficientSet coeffs_;
    int n_;
};

// exp(-I(x,y)) * b(h(x,y)) via the flow map.
double effective_drift(const FlowMap& flow, double x, double y);
// Same built from the grid flow, Simpson per y-grid cell for the exponent.
double effective_drift_euler(const EulerFlowGrid& grid, double x, double y);

enum class Provenance { reference_y, euler_y, x_exact_h, x_euler, x_tilde };

struct SolutionPath {
    std::vector<double> grid;
    std::vector<double> y;
    std::vector<double> x; // empty until composed
    Provenance prov = Provenance::reference_y;
    int n = 0, m = 0; // grid-flow level / time-step count where applicable
    std::string tag() const;
    // Columns (t, Y, X); provenance header.
    void write_csv(std::ostream& os) const;
};

/// Reference solve of Y' = f(Y, B(t)) by classical fixed-step RK4 with the
/// driver linearly interpolated. `step` must divide the driver horizon.
SolutionPath solve_drift_ode(const CoefficientSet& c, const DriverPath& driver, double step);

/// Explicit Euler chain Y_{k+1} = Y_k + (T/m) f_n(Y_k, B_{t_k}).
SolutionPath euler_drift_path(const CoefficientSet& c, int n, int m, const DriverPath& driver);

// Pointwise composition X_t = h(Y_t, B_t); grids must agree.
SolutionPath compose_with_flow(const FlowMap& flow, const SolutionPath& y, const DriverPath& driver);
SolutionPath compose_with_grid(const EulerFlowGrid& grid, const SolutionPath& y,
                               const DriverPath& driver);

} // namespace fbmtp
