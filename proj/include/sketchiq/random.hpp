#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace sketchiq {

// All randomness in the project flows through these helpers so that runs are
// reproducible from a single seed regardless of platform or thread count.
// Distributions are spelled out explicitly instead of using the std::
// distribution classes, whose output is implementation-defined.

// splitmix64 finalizer; used to derive independent streams from one seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Uniform integer in [0, n) by rejection, bias-free.
inline std::uint64_t bounded_u64(std::mt19937_64& rng, std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

// Uniform double in [0, 1) with 53 bits of precision.
inline double uniform_real(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller (cosine branch; one draw per call).
inline double gaussian(std::mt19937_64& rng) {
    const double u1 = 1.0 - uniform_real(rng);  // (0, 1], keeps log finite
    const double u2 = uniform_real(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Fisher-Yates permutation of 0..n-1.
inline std::vector<int> shuffled_indices(int n, std::mt19937_64& rng) {
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    for (int i = 0; i < n - 1; ++i) {
        const int j = i + static_cast<int>(bounded_u64(rng, static_cast<std::uint64_t>(n - i)));
        std::swap(idx[i], idx[j]);
    }
    return idx;
}

}  // namespace sketchiq
