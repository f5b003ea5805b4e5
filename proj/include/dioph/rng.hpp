#pragma once

// Counter-based randomness: every draw is a pure function of
// (seed, stream, counter), so experiments replay from the manifest alone.

#include <gmpxx.h>

#include <cstdint>

#include "dioph/precision.hpp"

namespace dioph {

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t counter_word(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return mix64(mix64(seed ^ mix64(stream)) ^ mix64(counter * 0xd1b54a32d192ed03ULL + stream));
}

/// Uniform dyadic rational in [0, 1) with `bits` random bits, as an exact ball.
CertifiedReal uniform_dyadic(std::uint64_t seed, std::uint64_t stream, int bits, int prec);

/// Uniform double in [0, 1) (53 bits).
inline double uniform_double(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return static_cast<double>(counter_word(seed, stream, counter) >> 11) * 0x1.0p-53;
}

}  // namespace dioph
