#pragma once

#include <cstdint>
#include <random>

namespace bot {

/// Seeded engine used throughout; all randomness flows from explicit seeds.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) built from the top 53 bits; identical across standard libraries.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform double in (0, 1].
inline double uniform_open_closed(Rng& rng) { return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53; }

/// Uniform integer in [0, bound) without modulo bias.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % bound;
}

/// Derives an independent stream seed from a base seed and a stream index (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace bot
