#pragma once

#include <string>
#include <vector>

namespace fbmtp {

// Measured quantity against an explicit bound. pass <=> margin() >= 0.
// Upper-bound checks store the quantity in `measured` and the cap in `bound`.
// Families of pointwise inequalities store the worst excess (lhs - rhs) in
// `measured` with bound = 0; the convention is noted in `context`.
struct BoundReport {
    std::string name;
    double measured = 0.0;
    double bound = 0.0;
    std::string context;

    double margin() const { return bound - measured; }
    bool pass() const { return margin() >= 0.0; }
};

struct RateRow {
    int n = 0;
    int replicas = 0;
    double mean_err = 0.0;
    double median_err = 0.0;
    double max_err = 0.0;
};

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0; // rms of log-space residuals
};

struct RateTable {
    std::vector<RateRow> rows;
    RateFit fit;
};

} // namespace fbmtp
