#ifndef QSMETRIC_RNG_HPP
#define QSMETRIC_RNG_HPP

#include <cstdint>
#include <string_view>

namespace qsmetric {

// Counter-based generator: splitmix64 finalizer applied to seed + counter.
// Streams are derived by indexing, never by mutation, so any (seed, purpose,
// item) triple yields the same draws no matter how work is scheduled.
inline constexpr std::string_view kRngAlgorithm = "splitmix64-ctr-v1";

namespace detail {
inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}
}  // namespace detail

// i-th value of the stream rooted at seed.
inline constexpr std::uint64_t rng_value(std::uint64_t seed, std::uint64_t i) {
    return detail::mix64(seed + (i + 1) * detail::kGolden);
}

// Fixed purpose tags keep independent samplers on disjoint streams.
enum class StreamPurpose : std::uint64_t {
    pairs = 1,
    paths = 2,
    triples = 3,
    lln = 4,
    km = 5,
    walk = 6,
    lipschitz = 7,
    content = 8,
    diameter = 9,
    monotone = 10,
};

inline constexpr std::uint64_t stream_seed(std::uint64_t seed, StreamPurpose p) {
    return rng_value(seed, static_cast<std::uint64_t>(p));
}

inline constexpr std::uint64_t item_seed(std::uint64_t stream, std::uint64_t item) {
    return rng_value(stream, item);
}

// Sequential view of one item's stream; rejection sampling advances the
// counter, so consumption order is part of the scheme.
class Rng {
  public:
    explicit constexpr Rng(std::uint64_t seed) : seed_(seed) {}

    constexpr std::uint64_t next() { return rng_value(seed_, counter_++); }

    // Unbiased integer in [0, bound) (Lemire's multiply-with-rejection).
    std::uint64_t below(std::uint64_t bound) {
        unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < bound) {
            const std::uint64_t cutoff = (0 - bound) % bound;
            while (lo < cutoff) {
                m = static_cast<unsigned __int128>(next()) * bound;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Bernoulli(num/den), exact.
    bool bernoulli(std::uint64_t num, std::uint64_t den) { return below(den) < num; }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

}  // namespace qsmetric

#endif
