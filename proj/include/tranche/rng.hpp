#pragma once

#include <cstdint>

#include "tranche/normal.hpp"

namespace tranche::rng {

/// Counter-based uniform stream: draw k of stream `seed` is a pure function
/// of (seed, k), so any partition of the index range over threads reproduces
/// the same variates. This is the splitmix64 sequence addressed by index.
inline std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;

/// Uniform variate in the open interval (0,1).
inline double uniform_open(std::uint64_t seed, std::uint64_t counter) {
    const std::uint64_t bits = mix(seed + (counter + 1) * golden_gamma);
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal variate via the inverse-cdf transform.
inline double standard_normal(std::uint64_t seed, std::uint64_t counter) {
    return std_normal_inv_cdf(uniform_open(seed, counter));
}

} // namespace tranche::rng
