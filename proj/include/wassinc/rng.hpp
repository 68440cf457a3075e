#pragma once

#include <cstdint>

namespace wassinc::rng {

// Counter-based generator: every draw is a pure function of
// (seed, stream, counter), so samplers are reproducible in any order and
// across implementations.
//
//   z = seed + 0x9E3779B97F4A7C15 * (counter + 1) + 0xD1B54A32D192ED03 * (stream + 1)   (mod 2^64)
//   bits = splitmix64_finalize(splitmix64_finalize(z))
//
// with splitmix64_finalize(z) = (z ^ z>>30) * 0xBF58476D1CE4E5B9,
// then (z ^ z>>27) * 0x94D049BB133111EB, then z ^ z>>31.
std::uint64_t bits(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

// (bits >> 11) * 2^-53, in [0, 1).
double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

// Box-Muller cosine branch on uniforms at counters 2c and 2c+1:
//   sqrt(-2 log(1 - u0)) * cos(2 pi u1).
double normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

// Uniform index in [0, n) by multiply-shift of the 64 random bits.
std::uint64_t index(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter, std::uint64_t n);

}  // namespace wassinc::rng
