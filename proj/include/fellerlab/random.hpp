#pragma once

// Counter-based generator: every draw is a pure function of
// (seed, label, counter), so streams split by label without shared state.

#include <cstdint>
#include <string_view>

namespace feller::rng {

inline std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t label_hash(std::string_view label) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : label) h = (h ^ c) * 0x100000001b3ULL;
    return h;
}

inline std::uint64_t bits(std::uint64_t seed, std::string_view label, std::uint64_t counter) {
    return mix(mix(seed ^ label_hash(label)) + counter);
}

/// Uniform in [0, 1).
inline double uniform(std::uint64_t seed, std::string_view label, std::uint64_t counter) {
    return static_cast<double>(bits(seed, label, counter) >> 11) * 0x1.0p-53;
}

}  // namespace feller::rng
