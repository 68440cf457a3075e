#include "wassinc/rng.hpp"

#include <cmath>
#include <numbers>

namespace wassinc::rng {

namespace {

std::uint64_t finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t bits(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  const std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (counter + 1) + 0xD1B54A32D192ED03ULL * (stream + 1);
  return finalize(finalize(z));
}

double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  return static_cast<double>(bits(seed, stream, counter) >> 11) * 0x1.0p-53;
}

double normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  const double u0 = uniform(seed, stream, 2 * counter);
  const double u1 = uniform(seed, stream, 2 * counter + 1);
  return std::sqrt(-2.0 * std::log(1.0 - u0)) * std::cos(2.0 * std::numbers::pi * u1);
}

std::uint64_t index(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter, std::uint64_t n) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(bits(seed, stream, counter)) * n) >> 64);
}

}  // namespace wassinc::rng
