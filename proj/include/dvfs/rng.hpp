#pragma once

#include <cstdint>

namespace dvfs {

/// SplitMix64 (Steele, Lea, Flood 2014): 64-bit state, one output per call.
///
///     state += 0x9E3779B97F4A7C15
///     z = state
///     z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///     z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///     return z ^ (z >> 31)
///
/// uniform01() takes the top 53 bits: (next() >> 11) * 2^-53, in [0, 1).
/// Any language with wrapping 64-bit unsigned arithmetic reproduces the stream.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    auto next() -> std::uint64_t
    {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    auto uniform01() -> double { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// lo + u * (hi - lo); returns lo exactly when lo == hi.
    auto uniform(double lo, double hi) -> double { return lo + uniform01() * (hi - lo); }

    /// floor(u * n), n > 0.
    auto index(std::uint64_t n) -> std::uint64_t
    {
        return static_cast<std::uint64_t>(uniform01() * static_cast<double>(n));
    }

private:
    std::uint64_t state_;
};

} // namespace dvfs
