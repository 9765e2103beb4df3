#pragma once

#include <functional>
#include <string>

#include "fbmtp/report.hpp"

namespace fbmtp {

/// Drift/diffusion pair with derivatives and their declared sup bounds:
/// |b| <= m1, |sigma'| <= m2, |sigma''| <= m3, |b'| <= m4 (b is m4-Lipschitz),
/// |sigma| <= m5. x0 is the initial condition of the state equation.
struct CoefficientSet {
    std::function<double(double)> sigma, dsigma, ddsigma, b, db;
    double m1 = 0, m2 = 0, m3 = 0, m4 = 0, m5 = 0;
    double x0 = 0.0;
    std::string name = "custom";

    double mbar() const { return m2 > m5 ? m2 : m5; }
};

CoefficientSet preset_linear(double b0, double c, double x0 = 0.1);
CoefficientSet preset_sin_cos(double x0 = 0.1);
CoefficientSet preset_arctan(double x0 = 0.1);
// Lookup by name: "linear" (uses b0, c), "sin-cos", "arctan-demo".
CoefficientSet coefficient_preset(const std::string& name, double b0, double c, double x0);

// Samples |sigma|, |sigma'|, |sigma''|, |b|, |b'| on a uniform grid and
// compares against the declared bounds. measured = worst excess over any
// bound (<= 0 when all hold), bound = 0; context lists the witnesses.
BoundReport validate_coeffs(const CoefficientSet& c, double lo, double hi, int samples);

} // namespace fbmtp
