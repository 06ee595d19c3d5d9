#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

namespace subtest {

// The one generator type used across the project. Every stochastic
// operation takes a generator by reference; there is no global state.
using Rng = std::mt19937_64;

// splitmix64 finalizer. Used for seed derivation; fixed for all time so
// that reports are reproducible across versions.
inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Per-trial seed = mix(mix(master) ^ trial index). Trials are therefore
// independent of execution order and parallelism degree.
inline uint64_t derive_seed(uint64_t master, uint64_t index) {
    return mix64(mix64(master) ^ index);
}

// Uniform double in [0, 1) with 53 random bits. Hand-rolled instead of
// std::uniform_real_distribution so the stream is pinned to the engine.
inline double uniform_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Unbiased uniform integer in [0, n) by rejection.
inline int64_t uniform_index(Rng& rng, int64_t n) {
    if (n <= 0) throw std::invalid_argument("uniform_index: n must be positive");
    const uint64_t un = static_cast<uint64_t>(n);
    const uint64_t threshold = (0 - un) % un;
    for (;;) {
        uint64_t r = rng();
        if (r >= threshold) return static_cast<int64_t>(r % un);
    }
}

// Poisson(lambda) variate. Chop-down inversion for small lambda; PTRD
// transformed rejection (exact acceptance test against the pmf, no normal
// approximation) for large lambda.
int64_t poisson(double lambda, Rng& rng);

} // namespace subtest
