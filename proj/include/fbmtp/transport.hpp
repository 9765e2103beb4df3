#pragma once

#include <algorithm>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "fbmtp/quadrature.hpp"
#include "fbmtp/rng.hpp"

namespace fbmtp {

enum class Orientation { forward, backward };

// One linear segment in real-time coordinates.
struct TransportPiece {
    double t0, t1;  // [t0, t1], t0 < t1
    double v0;      // value at t0
    double slope;   // +rate or -rate
};

/// Piecewise-linear velocity-reversal path. The particle moves with speed
/// `rate`, flipping direction after i.i.d. Exponential(rate^2) holding
/// times. Forward paths start with value 0 at the left endpoint of their
/// interval [0, horizon]; backward paths are anchored with value 0 at the
/// right endpoint of [-horizon, 0] and extend to the left. Immutable after
/// construction, safe to share across threads.
class TransportPath {
public:
    TransportPath(double rate, int initial_sign, std::vector<double> gaps, double horizon,
                  Orientation orientation);

    static TransportPath generate(double rate, double horizon, Orientation orientation,
                                  RngSeed seed);

    double rate() const { return rate_; }
    int initial_sign() const { return initial_sign_; }
    Orientation orientation() const { return orient_; }
    double interval_lo() const { return lo_; }
    double interval_hi() const { return hi_; }
    double horizon() const { return hi_ - lo_; }
    // value-0 endpoint
    double anchor() const { return orient_ == Orientation::forward ? lo_ : hi_; }

    // Holding-time gaps in elapsed order (the raw exponential draws).
    const std::vector<double>& gaps() const { return gaps_; }
    // Reversal times elapsed from the path start (cumulative gaps).
    std::vector<double> reversal_times() const;
    const std::vector<TransportPiece>& pieces() const { return pieces_; }

    double value_at(double t) const;

    // Exact maximum of |path| over the interval (attained at nodes/endpoints).
    double sup_abs() const;

    // Stieltjes integral of a kernel against the path over [lo, hi],
    // per-piece via a closed-form antiderivative of the kernel.
    template <class Primitive>
    double integrate_primitive(Primitive&& antiderivative, double lo, double hi) const {
        check_range(lo, hi);
        double acc = 0.0;
        double prev = 0.0;
        bool have_prev = false;
        for (std::size_t i = first_piece(lo); i < pieces_.size(); ++i) {
            const TransportPiece& p = pieces_[i];
            if (p.t0 >= hi) break;
            const double c = std::max(p.t0, lo);
            const double d = std::min(p.t1, hi);
            if (d <= c) continue;
            const double pc = (have_prev && c == p.t0) ? prev : antiderivative(c);
            const double pd = antiderivative(d);
            acc += p.slope * (pd - pc);
            prev = pd;
            have_prev = (d == p.t1);
        }
        return acc;
    }

    // Same integral with per-piece adaptive quadrature of the kernel.
    template <class Kernel>
    double integrate_adaptive(Kernel&& kernel, double lo, double hi, double rel_tol = 1e-10) const {
        check_range(lo, hi);
        QuadOptions opt;
        opt.rel_tol = rel_tol;
        double acc = 0.0;
        for (std::size_t i = first_piece(lo); i < pieces_.size(); ++i) {
            const TransportPiece& p = pieces_[i];
            if (p.t0 >= hi) break;
            const double c = std::max(p.t0, lo);
            const double d = std::min(p.t1, hi);
            if (d <= c) continue;
            acc += p.slope * adaptive_simpson(kernel, c, d, opt);
        }
        return acc;
    }

    // Columns: piece_index, start_time, end_time, start_value, slope.
    void write_csv(std::ostream& os) const;

private:
    void check_range(double lo, double hi) const;
    std::size_t first_piece(double lo) const;

    double rate_;
    int initial_sign_;
    Orientation orient_;
    double lo_, hi_;
    std::vector<double> gaps_;
    std::vector<TransportPiece> pieces_; // sorted by t0, contiguous
};

} // namespace fbmtp
