#pragma once

#include <cstdint>
#include <random>

namespace matplane {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to decorrelate neighbouring seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed-splitting convention: stream i of base seed s is mix(s + i).
constexpr std::uint64_t split_seed(std::uint64_t base, std::uint64_t stream) noexcept {
  return splitmix64(base + stream);
}

/// Derives an independent base seed for a named sub-computation (e.g. the
/// right-hand side of an identity check) so that its streams never overlap
/// with those of `base`.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) noexcept {
  return splitmix64(base ^ splitmix64(salt ^ 0xD1B54A32D192ED03ULL));
}

inline Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

}  // namespace matplane
