#include "fbmtp/transport.hpp"

#include <cmath>
#include <ostream>

#include "fbmtp/io.hpp"

namespace fbmtp {

TransportPath::TransportPath(double rate, int initial_sign, std::vector<double> gaps,
                             double horizon, Orientation orientation)
    : rate_(rate), initial_sign_(initial_sign), orient_(orientation), gaps_(std::move(gaps)) {
    if (!(rate > 0.0)) throw std::invalid_argument("transport: rate must be positive");
    if (!(horizon > 0.0)) throw std::invalid_argument("transport: horizon must be positive");
    if (initial_sign != 1 && initial_sign != -1)
        throw std::invalid_argument("transport: initial_sign must be +1 or -1");
    if (gaps_.empty()) throw std::invalid_argument("transport: empty gap list");
    double cum = 0.0;
    for (double g : gaps_) {
        if (!(g > 0.0)) throw std::invalid_argument("transport: gaps must be positive");
        cum += g;
    }
    if (cum < horizon) throw std::invalid_argument("transport: gaps do not cover the horizon");

    lo_ = orient_ == Orientation::forward ? 0.0 : -horizon;
    hi_ = orient_ == Orientation::forward ? horizon : 0.0;

    // Elapsed-time nodes and values, last piece clamped at the horizon.
    std::vector<double> node_t{0.0}, node_v{0.0};
    double t = 0.0, v = 0.0;
    int sgn = initial_sign_;
    for (double g : gaps_) {
        double t_next = t + g;
        if (t_next >= horizon) {
            node_t.push_back(horizon);
            node_v.push_back(v + sgn * rate_ * (horizon - t));
            break;
        }
        t = t_next;
        v += sgn * rate_ * g;
        node_t.push_back(t);
        node_v.push_back(v);
        sgn = -sgn;
    }

    const std::size_t k = node_t.size() - 1;
    pieces_.reserve(k);
    if (orient_ == Orientation::forward) {
        int s = initial_sign_;
        for (std::size_t i = 0; i < k; ++i) {
            pieces_.push_back({lo_ + node_t[i], lo_ + node_t[i + 1], node_v[i], s * rate_});
            s = -s;
        }
    } else {
        // elapsed time runs right-to-left; real-time slope is negated
        int s = initial_sign_;
        std::vector<TransportPiece> rev;
        rev.reserve(k);
        for (std::size_t i = 0; i < k; ++i) {
            rev.push_back({hi_ - node_t[i + 1], hi_ - node_t[i], node_v[i + 1], -s * rate_});
            s = -s;
        }
        pieces_.assign(rev.rbegin(), rev.rend());
    }
}

TransportPath TransportPath::generate(double rate, double horizon, Orientation orientation,
                                      RngSeed seed) {
    if (!(rate > 0.0)) throw std::invalid_argument("transport: rate must be positive");
    if (!(horizon > 0.0)) throw std::invalid_argument("transport: horizon must be positive");
    CounterRng rng(seed);
    const int sign = rng.next_sign();
    const double lambda = rate * rate;
    std::vector<double> gaps;
    gaps.reserve(static_cast<std::size_t>(lambda * horizon * 1.1) + 8);
    double cum = 0.0;
    while (cum < horizon) {
        const double g = rng.next_exponential(lambda);
        gaps.push_back(g);
        cum += g;
    }
    return TransportPath(rate, sign, std::move(gaps), horizon, orientation);
}

std::vector<double> TransportPath::reversal_times() const {
    std::vector<double> out;
    out.reserve(gaps_.size());
    double cum = 0.0;
    for (double g : gaps_) {
        cum += g;
        out.push_back(cum);
    }
    return out;
}

void TransportPath::check_range(double lo, double hi) const {
    if (lo > hi) throw std::domain_error("transport: inverted integration range");
    if (lo < lo_ - 1e-12 || hi > hi_ + 1e-12)
        throw std::domain_error("transport: integration range outside the path interval");
}

std::size_t TransportPath::first_piece(double lo) const {
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), lo,
                               [](double v, const TransportPiece& p) { return v < p.t1; });
    return static_cast<std::size_t>(it - pieces_.begin());
}

double TransportPath::value_at(double t) const {
    if (t < lo_ || t > hi_) throw std::domain_error("transport: time outside the path interval");
    const std::size_t i = std::min(first_piece(t), pieces_.size() - 1);
    const TransportPiece& p = pieces_[i];
    return p.v0 + p.slope * (t - p.t0);
}

double TransportPath::sup_abs() const {
    double m = 0.0;
    for (const TransportPiece& p : pieces_) m = std::max(m, std::abs(p.v0));
    const TransportPiece& last = pieces_.back();
    m = std::max(m, std::abs(last.v0 + last.slope * (last.t1 - last.t0)));
    return m;
}

void TransportPath::write_csv(std::ostream& os) const {
    os << "piece_index,start_time,end_time,start_value,slope\n";
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        const TransportPiece& p = pieces_[i];
        os << i << ',' << fmt_full(p.t0) << ',' << fmt_full(p.t1) << ',' << fmt_full(p.v0) << ','
           << fmt_full(p.slope) << '\n';
    }
}

} // namespace fbmtp
