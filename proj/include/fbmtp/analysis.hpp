#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fbmtp/coefficients.hpp"
#include "fbmtp/doss.hpp"
#include "fbmtp/fbm.hpp"
#include "fbmtp/report.hpp"

namespace fbmtp {

// Max |p1(t) - p2(t)| over a shared grid; grid mismatch throws.
double sup_norm_diff(const DriverPath& p1, const DriverPath& p2);
double sup_norm_diff(const SolutionPath& p1, const SolutionPath& p2);

// n^{-1/2+beta+delta} (log n)^{5/2}; requires n > 1 and valid (beta, delta).
double target_rate(double n, double beta, double delta);

// Least squares of log(error) on log(n). Requires >= 2 strictly increasing
// n with positive errors.
RateFit rate_fit(std::span<const double> ns, std::span<const double> errors);
RateFit rate_fit(const std::vector<int>& ns, const std::vector<double>& errors);

struct SampleSpec {
    double x_lo = -1.95, x_hi = 2.05;
    double y_lo = -1.90, y_hi = 2.10;
    int nx = 32, ny = 32;
    double fd_step = 1e-5;   // finite-difference step for the x-derivative item
    double pair_dx = 0.35;   // offset for two-point x inequalities
    double pair_dy = 0.40;   // offset for two-point y inequalities
};

// The eight flow-map inequalities (sensitivity caps and Lipschitz moduli),
// each reported as worst excess (lhs - rhs) over the sample grid; bound 0.
std::vector<BoundReport> check_h_bounds(const CoefficientSet& c, const SampleSpec& spec = {});

// arctan diffusion: exp(-I(x,y)) >= exp(|y|/(1+x^2)) on x<0, y<0, i.e. the
// inverse x-sensitivity is unbounded there. Worst (floor - value) excess.
BoundReport check_arctan_floor(const SampleSpec& spec = {});

// Max |flow - grid flow at level l| over [-n,n]^2 sampled at spacing 1/l,
// against mbar^2 (n/l) exp(mbar n).
BoundReport check_h_euler_bound(const CoefficientSet& c, int n, int l);

// Path-statistics entering the explicit Euler-error bounds; everything is
// measured on the given driver, nothing is assumed.
struct ProofQuantities {
    double sup_b = 0;       // max |B| on the grid
    double khat = 0;        // audited Lipschitz ratio
    double z1 = 0, z2 = 0;  // drift Lipschitz moduli in x and in the driver
    double nbox = 0;        // box radius containing (Y^{n,m}, B)
    double j_nm = 0;        // per-step error aggregate
    double y_sup_bound = 0; // envelope for |Y^{n,m}|
    double y_gap_bound = 0; // bound for sup|Y_ref - Y^{n,m}|
    double z5 = 0, z6 = 0;  // composition factors
    double x_gap_bound = 0; // bound for sup|X-tilde - X-euler|
};
ProofQuantities proof_quantities(const CoefficientSet& c, const ApproxParams& params, int m,
                                 const DriverPath& driver);

// Pathwise Euler-scheme bounds on one driver: the |Y^{n,m}| envelope and the
// reference-vs-Euler gap bound. Solves both paths internally.
std::vector<BoundReport> check_y_bounds(const CoefficientSet& c, int n, int m,
                                        const DriverPath& driver);

struct CovarianceConfig {
    ApproxParams params;
    std::vector<double> grid; // positive evaluation times
    int replicas = 1000;
    std::uint64_t master_seed = 1;
    double se_mult = 3.0;
    double bias_allowance = 0.05;
    BuildMode mode = BuildMode::fast;
};

struct CovarianceResult {
    double max_abs_err = 0;             // max entrywise |MC - exact|
    std::vector<double> emp, exact, se; // k x k row-major
    BoundReport report;                 // excess vs (se_mult*SE + bias_allowance)
};

CovarianceResult covariance_experiment(const CovarianceConfig& cfg);

struct ConvergenceConfig {
    CoefficientSet coeffs;
    ApproxParams base; // n is taken from the sweep
    std::vector<int> ns;
    int replicas = 20;
    std::uint64_t master_seed = 1;
    bool pathwise_bound = true;
};

struct ConvergenceResult {
    RateTable table;                    // sup|X-tilde - X-euler| statistics, fit on means
    std::vector<BoundReport> pathwise;  // per-(n, replica) composition-gap bounds
    std::vector<double> khat;           // audited ratio per sweep entry (max over replicas)
};

ConvergenceResult convergence_experiment(const ConvergenceConfig& cfg);

// Audited Lipschitz ratio per n (max over replicas), for trend checks.
std::vector<double> lipschitz_sweep(const ApproxParams& base, const std::vector<int>& ns,
                                    int replicas, std::uint64_t master_seed);

// One-sample Kolmogorov-Smirnov statistic against the standard normal law,
// and the asymptotic critical value sqrt(-ln(alpha/2)/2)/sqrt(n).
double ks_statistic_normal(std::vector<double> samples);
double ks_critical(double alpha, std::size_t n);

} // namespace fbmtp
