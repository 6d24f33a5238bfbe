#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace prosel {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer: a bijective 64-bit mixing function.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Counter-based seed derivation.
///
///   derive_seed(s, {a, b, ...}) = mix64(... mix64(mix64(s) ^ a) ^ b ...)
///
/// Each stream index is folded in with one round of mixing, so the seed of
/// run i depends only on (master seed, i) and never on execution order.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = mix64(master);
  for (auto p : path) h = mix64(h ^ p);
  return h;
}

/// Uniform integer in [lo, hi] (inclusive).
inline long uniform_int(Rng& rng, long lo, long hi) {
  return std::uniform_int_distribution<long>(lo, hi)(rng);
}

}  // namespace prosel
