#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace fbmtp {

// Seed of one reproducible draw stream. Equal (master_seed, stream_index)
// pairs reproduce the same sequence regardless of scheduling; distinct
// stream indices give statistically independent streams.
struct RngSeed {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_index = 0;
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}
} // namespace detail

// Counter-based generator (splitmix finalizer over a keyed counter):
// output i is a pure function of (seed, i), so paths can be regenerated
// independently of thread order.
class CounterRng {
public:
    explicit CounterRng(RngSeed seed)
        : key_(detail::mix64(seed.master_seed + 0x9E3779B97F4A7C15ull) ^
               detail::mix64(seed.stream_index * 0xBF58476D1CE4E5B9ull + 0xD1B54A32D192ED03ull)) {}

    std::uint64_t next_u64() {
        counter_ += 0x9E3779B97F4A7C15ull;
        return detail::mix64(key_ + counter_);
    }

    // Uniform on (0,1), endpoints excluded.
    double next_u01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double next_exponential(double lambda) {
        return -std::log(next_u01()) / lambda;
    }

    int next_sign() { return (next_u64() & 1ull) ? 1 : -1; }

    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_u01();
        const double u2 = next_u01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace fbmtp
