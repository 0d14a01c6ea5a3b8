#pragma once

#include <cstdint>
#include <random>

namespace ocsp {

// All randomized operations take an explicit 64-bit seed and use mt19937_64
// through these helpers only, so results are identical across platforms
// (std::uniform_*_distribution is not portable; these are).
using Rng = std::mt19937_64;

inline constexpr std::uint64_t kDefaultSeed = 1729;

inline double rng_unit(Rng& g) {
    // 53 random mantissa bits in [0,1).
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline std::uint64_t rng_below(Rng& g, std::uint64_t n) {
    // Rejection-free multiply-shift; bias < 2^-64, fine for test workloads.
    unsigned __int128 wide = static_cast<unsigned __int128>(g()) * n;
    return static_cast<std::uint64_t>(wide >> 64);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Stream seed for shard k of a run seeded with `seed`; shards are merged in
// shard order so results do not depend on scheduling.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t shard) {
    return splitmix64(seed ^ splitmix64(shard + 1));
}

}  // namespace ocsp
