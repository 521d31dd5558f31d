#ifndef BDEPI_RNG_HPP_
#define BDEPI_RNG_HPP_

#include <cstdint>
#include <random>

namespace bdepi {

/// Deterministic random stream. mt19937_64 output is fixed by the
/// standard, and uniforms are drawn below without going through the
/// implementation-defined std distributions, so streams reproduce
/// bit-identically across platforms.
using RngStream = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent substream for the index-th parallel task under one root seed.
inline RngStream derive_stream(std::uint64_t root_seed, std::uint64_t index) {
  return RngStream(splitmix64(root_seed ^ splitmix64(index + 1)));
}

/// Uniform draw in [0, 1) with 53 random bits.
inline double next_uniform(RngStream& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace bdepi

#endif  // BDEPI_RNG_HPP_
