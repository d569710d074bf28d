#pragma once

#include <cmath>
#include <cstdint>

namespace loglab {

// Counter-based deterministic random stream. Every draw is a pure function
// of (seed, path, step, lane): no hidden state, so path p / step k sees the
// same increment no matter how many paths run or in what order. That is
// what makes common-random-number policy comparisons valid.

namespace detail {

// SplitMix64 finalizer, a bijection on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace detail

inline std::uint64_t counter_value(std::uint64_t seed, std::uint64_t path,
                                   std::uint64_t step, std::uint64_t lane) {
    std::uint64_t h = detail::mix64(seed);
    h = detail::mix64(h ^ path);
    h = detail::mix64(h ^ step);
    h = detail::mix64(h ^ lane);
    return h;
}

// Uniform in the open interval (0, 1): top 53 bits offset by half an ulp,
// so neither endpoint is reachable and log/Box-Muller stay finite.
inline double uniform01(std::uint64_t seed, std::uint64_t path,
                        std::uint64_t step, std::uint64_t lane) {
    const std::uint64_t bits = counter_value(seed, path, step, lane) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1p-53;
}

// Standard normal via Box-Muller on lanes 0 and 1 of the same counter.
inline double normal_draw(std::uint64_t seed, std::uint64_t path,
                          std::uint64_t step) {
    const double u1 = uniform01(seed, path, step, 0);
    const double u2 = uniform01(seed, path, step, 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(6.283185307179586476925286766559 * u2);
}

}  // namespace loglab
