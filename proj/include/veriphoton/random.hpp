#pragma once

#include <cstdint>
#include <random>

namespace veriphoton {

/// Random stream used throughout the library. mt19937_64 output is fixed by
/// the standard, and the helpers below avoid the implementation-defined
/// std:: distributions so that seeded runs are byte-identical everywhere.
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for the stream owned by (trial, repetition). Repetition 0 is the
/// Protocol-1 stream of a trial; repetitions 1..N carry pulse sampling.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial,
                                 std::uint64_t repetition = 0) {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ (trial * 0xd1b54a32d192ed03ULL));
    h = splitmix64(h ^ (repetition * 0x8cb92ba72f3d8dd7ULL));
    return h;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline int random_bit(Rng& rng) { return static_cast<int>(rng() >> 63); }

/// Uniform integer in [0, n). Rejection sampling keeps it unbiased.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

}  // namespace veriphoton
