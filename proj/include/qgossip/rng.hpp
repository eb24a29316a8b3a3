#pragma once

#include <cstdint>
#include <random>

namespace qgossip {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. A bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of stream `index` under `master`. Distinct indices give distinct seeds
/// because mix64 is injective and master + index is distinct mod 2^64.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return mix64(master + index);
}

/// Uniform integer in [0, n).
inline int uniform_index(Rng &rng, int n) {
    return std::uniform_int_distribution<int>(0, n - 1)(rng);
}

inline double uniform01(Rng &rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

} // namespace qgossip
