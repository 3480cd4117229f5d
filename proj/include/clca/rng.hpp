#pragma once

#include <cstdint>

namespace clca {

/// SplitMix64 output function (Steele, Lea, Flood). Bijective 64-bit mixer.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// Stateless counter-based generator. Every (stream, slot, index) triple maps
/// to an independent 64-bit draw, so runs that share a seed observe the same
/// environment no matter which algorithm or V they use, and draws can be
/// made in any order.
class CounterRng {
public:
    explicit constexpr CounterRng(std::uint64_t seed) : key_(splitmix64_mix(seed + kGoldenGamma)) {}

    constexpr std::uint64_t bits(std::uint64_t stream, std::uint64_t slot,
                                 std::uint64_t index) const {
        std::uint64_t h = splitmix64_mix(key_ ^ (stream * kGoldenGamma));
        h = splitmix64_mix(h + slot * kGoldenGamma);
        return splitmix64_mix(h + (index + 1) * kGoldenGamma);
    }

    /// Uniform on [0, 1) with 53 bits of resolution.
    constexpr double uniform(std::uint64_t stream, std::uint64_t slot, std::uint64_t index) const {
        return static_cast<double>(bits(stream, slot, index) >> 11) * 0x1.0p-53;
    }

    constexpr double uniform(std::uint64_t stream, std::uint64_t slot, std::uint64_t index,
                             double lo, double hi) const {
        return lo + (hi - lo) * uniform(stream, slot, index);
    }

private:
    std::uint64_t key_;
};

namespace stream {
inline constexpr std::uint64_t channel = 1;
inline constexpr std::uint64_t harvest = 2;
inline constexpr std::uint64_t price = 3;
}  // namespace stream

}  // namespace clca
