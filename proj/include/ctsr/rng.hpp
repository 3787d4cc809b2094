#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ctsr {

// Sampling helpers on top of std::mt19937_64. The standard distributions are
// implementation-defined, so every draw the artifact depends on goes through
// these fixed formulas instead.
inline double uniform_real(std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
    // 53-bit mantissa draw in [0, 1)
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
}

inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
    // rejection sampling, unbiased for any n > 0
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

inline double normal(std::mt19937_64& rng) {
    // Box-Muller; discards the second variate to keep draws order-stable
    double u1;
    do {
        u1 = uniform_real(rng);
    } while (u1 <= 0.0);
    const double u2 = uniform_real(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

}  // namespace ctsr
