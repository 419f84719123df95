#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace excast::rng {

/// Uniform double in [0, 1) with 53 bits of precision.
inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Uniform double strictly inside (0, 1).
inline double uniform01_open(std::mt19937_64& gen) {
    return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
}

/// Unbiased uniform integer in [0, n). Rejection sampling keeps the
/// mapping reproducible across standard library implementations.
inline std::uint64_t bounded(std::mt19937_64& gen, std::uint64_t n) {
    const std::uint64_t min = (~n + 1) % n;  // 2^64 mod n
    std::uint64_t r = gen();
    while (r < min) r = gen();
    return r % n;
}

/// Weibull(shape, scale) draw by inverse transform; always > 0.
inline double weibull(std::mt19937_64& gen, double shape, double scale) {
    const double u = uniform01_open(gen);
    return scale * std::pow(-std::log1p(-u), 1.0 / shape);
}

/// SplitMix64 step, used to derive independent stream seeds.
inline std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace excast::rng
