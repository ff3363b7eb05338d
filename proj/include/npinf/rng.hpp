#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace npinf {

/// splitmix64 step; used to turn arbitrary 64-bit values into well-mixed seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministically derives the generator for run `index` of a batch seeded
/// with `master`. Runs are independent of scheduling order, so parallel
/// execution reproduces the sequential results.
inline std::mt19937_64 derive_rng(std::uint64_t master, std::uint64_t index) {
    return std::mt19937_64(splitmix64(master ^ splitmix64(index)));
}

/// Uniform double in (0, 1].
inline double uniform01_open_closed(std::mt19937_64& gen) {
    return static_cast<double>((gen() >> 11) + 1) * 0x1.0p-53;
}

/// Uniform double in [0, 1).
inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Uniform double in [lo, hi).
inline double uniform_real(std::mt19937_64& gen, double lo, double hi) {
    return lo + (hi - lo) * uniform01(gen);
}

/// Unbiased uniform index in [0, n). n must be > 0.
inline std::uint64_t uniform_index(std::mt19937_64& gen, std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v;
    do {
        v = gen();
    } while (v >= limit);
    return v % n;
}

/// Exponential variate with the given rate (> 0).
inline double exp_sample(std::mt19937_64& gen, double rate) {
    return -std::log(uniform01_open_closed(gen)) / rate;
}

}  // namespace npinf
