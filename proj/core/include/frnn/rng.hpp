#ifndef FRNN_RNG_HPP
#define FRNN_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace frnn {

// All randomness in the library flows through these helpers instead of the
// standard <random> distributions, whose output is implementation-defined.
// With a fixed seed the same sequence is produced on every platform.

/// Uniform integer in [0, bound) by rejection sampling. bound must be > 0.
inline std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
        x = gen();
    } while (x >= limit);
    return x % bound;
}

/// Uniform double in [0, 1) with 53 random mantissa bits.
inline double uniform_unit(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Standard normal deviate via Box-Muller (cosine branch only).
inline double standard_normal(std::mt19937_64& gen) {
    double u1 = uniform_unit(gen);
    while (u1 <= 0.0) u1 = uniform_unit(gen);
    const double u2 = uniform_unit(gen);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Fisher-Yates shuffle driven by uniform_below.
template <typename T>
void shuffle_inplace(std::vector<T>& values, std::mt19937_64& gen) {
    for (std::size_t i = values.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(uniform_below(gen, i));
        std::swap(values[i - 1], values[j]);
    }
}

} // namespace frnn

#endif
