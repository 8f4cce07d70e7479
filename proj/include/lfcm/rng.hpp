#ifndef LFCM_RNG_HPP
#define LFCM_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace lfcm {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Child seed for a named substream; the same (seed, path) always gives the
// same stream and distinct paths give unrelated streams.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = mix64(seed);
    for (std::uint64_t p : path) s = mix64(s ^ mix64(p + 0x632be59bd9b4e019ULL));
    return s;
}

// Stream tags.
enum StreamTag : std::uint64_t {
    kTopology = 1,
    kWeights = 2,
    kCalibration = 3,
    kNoise = 4,
    kBaseline = 5,
    kData = 6,
};

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> path = {}) {
    return Rng(derive_seed(seed, path));
}

}  // namespace lfcm

#endif  // LFCM_RNG_HPP
