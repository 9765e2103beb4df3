#pragma once

namespace fbmtp {

// Moving-average kernels of fractional Brownian motion with Hurst index H,
// split at time 0: the window kernel acts on [0,t), the history kernel on
// the negative half-line. Domain violations throw std::domain_error rather
// than silently taking complex powers.

// (t-s)^{H-1/2} for s < t.
double mvn_kernel_recent(double hurst, double t, double s);

// (t-s)^{H-1/2} - (-s)^{H-1/2} for s < 0 <= t.
double mvn_kernel_past(double hurst, double t, double s);

// d/ds of the history kernel: (H-1/2)[(-s)^{H-3/2} - (t-s)^{H-3/2}], s < 0.
double mvn_kernel_past_ds(double hurst, double t, double s);

// Antiderivatives in s (for Stieltjes integration against piecewise-linear
// paths). mvn_primitive_recent integrates (t-s)^{H-1/2}; mvn_primitive_past
// integrates the history kernel.
double mvn_primitive_recent(double hurst, double t, double s);
double mvn_primitive_past(double hurst, double t, double s);

// Antiderivative of u * d/du[history kernel](t, u) on u < 0; the limit
// u -> -inf is 0 for H < 1/2 and is accepted as input.
double tail_antideriv(double hurst, double t, double u);

// Weight applied to the compactified far-history path at s in [1/a, 0).
// `cutoff` < 0 caps the inner integration variable; pass cutoff = 0 for the
// uncapped branch. Closed form via tail_antideriv.
double tail_kernel(double hurst, double a, double cutoff, double t, double s);
// Same value by adaptive quadrature of u * d/du[history kernel].
double tail_kernel_quad(double hurst, double a, double cutoff, double t, double s,
                        double rel_tol = 1e-10);

// Scaling constant making Var(B^H_1) = 1 under the moving-average
// representation; computed from that defining property by quadrature.
double mvn_normalization(double hurst);

// (s^{2H} + t^{2H} - |s-t|^{2H}) / 2 for s, t >= 0.
double fbm_covariance(double hurst, double s, double t);

} // namespace fbmtp
