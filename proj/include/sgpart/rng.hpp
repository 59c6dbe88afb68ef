#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace sgp {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives a child seed from a base seed and a list of coordinates.
inline std::uint64_t mix_seed(std::uint64_t base,
                              std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = splitmix64(base);
  for (std::uint64_t part : parts) h = splitmix64(h ^ splitmix64(part));
  return h;
}

// Uniform in [0, 1) from the top 53 bits.
inline double unit_double(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace sgp
