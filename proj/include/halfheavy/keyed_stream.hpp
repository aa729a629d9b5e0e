#pragma once

#include <cstdint>

namespace halfheavy {

// Counter-based entry stream: every random variable of a matrix is a pure
// function of (seed, replicate, i, j, component), so any entry can be
// regenerated in isolation and generation order does not matter.
// Mixing is the SplitMix64 finalizer applied to a running key.
namespace keyed {

constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t combine(std::uint64_t key, std::uint64_t value) { return mix64(key ^ mix64(value)); }

constexpr std::uint64_t entry_bits(std::uint64_t seed, std::uint64_t replicate, std::uint64_t i, std::uint64_t j,
                                   std::uint64_t component) {
  std::uint64_t k = mix64(seed);
  k = combine(k, replicate);
  k = combine(k, i);
  k = combine(k, j);
  return combine(k, component);
}

// Top 53 bits mapped onto (0, 1]; the lowest bit is left for the sign.
constexpr double uniform_open_closed(std::uint64_t bits) {
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

constexpr int sign_bit(std::uint64_t bits) { return (bits & 1u) ? 1 : -1; }

// Derives the per-(N) ensemble seed from a master seed.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag) { return combine(mix64(master), tag); }

}  // namespace keyed
}  // namespace halfheavy
