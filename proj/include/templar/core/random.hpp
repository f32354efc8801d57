#pragma once

#include <cstdint>

namespace templar::random {

// SplitMix64 finalizer; a bijective mix of a 64-bit counter.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Counter-based stream: element i of a draw depends only on (seed, i), so every
// backend produces bit-identical samples without shared mutable RNG state.
constexpr std::uint64_t bits(std::uint64_t seed, std::uint64_t counter) {
  return mix64(mix64(seed) ^ (counter * 0xD1B54A32D192ED03ull));
}

// Uniform double on [0, 1) with 53 random bits.
constexpr double unit_double(std::uint64_t seed, std::uint64_t counter) {
  return static_cast<double>(bits(seed, counter) >> 11) * 0x1.0p-53;
}

}  // namespace templar::random
