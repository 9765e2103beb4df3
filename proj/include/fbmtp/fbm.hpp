#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fbmtp/report.hpp"
#include "fbmtp/rng.hpp"
#include "fbmtp/transport.hpp"

namespace fbmtp {

/// Parameter tuple governing the transport-driven approximation: Hurst
/// index, the (beta, delta) rate exponents, the negative split point a,
/// the velocity index n and the time horizon. The constraint chain
/// |H-1/2| < beta < 1/2, 0 < delta < beta, beta + delta < 1/2 is enforced
/// at construction, as is cutoff() in (max(a, 1/a), 0).
struct ApproxParams {
    double hurst = 0.75;
    double beta = 0.3;
    double delta = 0.05;
    double a = -1.0;
    int n = 8;
    double horizon = 1.0;

    // Negative truncation level -n^{-beta/|H-1/2|} of the far-history weight.
    double cutoff() const;
    void validate() const; // throws std::invalid_argument naming the key
};

enum class DriverKind { transport_approx, exact_fbm };

// A driver sampled on a time grid; linear interpolation between nodes.
struct DriverPath {
    std::vector<double> grid;   // sorted, unique, grid[0] == 0
    std::vector<double> values; // values[0] == 0
    DriverKind kind = DriverKind::exact_fbm;
    double hurst = 0.5;
    std::optional<ApproxParams> params;    // transport drivers only
    std::optional<double> lipschitz;       // measured max |dv|/|dt| on the grid
    std::optional<RngSeed> seed;

    double value_at(double t) const;
    double sup_abs() const;
    double horizon() const { return grid.back(); }
    // Columns (t, value); '#'-prefixed metadata header.
    void write_csv(std::ostream& os) const;
};

enum class BuildMode {
    fast,      // closed-form per-piece terms, OpenMP over grid points
    reference  // serial construction via transport Stieltjes integration
};

/// Assemble the transport-driven approximation of fractional Brownian
/// motion on the given grid. z1 must be forward on [0,T], z2 backward on
/// [a,0], z3 backward on [1/a,0], all with rate n.
DriverPath build_transport_driver(const ApproxParams& params, const TransportPath& z1,
                                  const TransportPath& z2, const TransportPath& z3,
                                  std::vector<double> grid, BuildMode mode = BuildMode::fast,
                                  double quad_rel_tol = 1e-10);

// Convenience wrapper generating the three transport paths from sub-streams
// (stream_index*3 + {0,1,2}) of the given seed.
DriverPath make_transport_driver(const ApproxParams& params, std::vector<double> grid,
                                 RngSeed seed, BuildMode mode = BuildMode::fast);

/// Exact fractional Brownian motion on a grid (dense Cholesky of the
/// covariance; grid capped at 4096 points). H = 1/2 is allowed here.
DriverPath exact_fbm(double hurst, std::vector<double> grid, RngSeed seed);

class FactorizationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Measured grid-Lipschitz ratio K^ = max|dv/dt| / n^{1+beta}.
double lipschitz_ratio(const DriverPath& driver);
// The same as a report; throws std::invalid_argument for exact-fbm drivers.
BoundReport lipschitz_audit(const DriverPath& driver);

// Uniform time grid {0, T/m, ..., T}.
std::vector<double> uniform_grid(double horizon, int m);

} // namespace fbmtp
