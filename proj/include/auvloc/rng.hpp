#pragma once

#include <cstdint>
#include <random>

namespace auvloc {

/// Seeded random stream. Every stochastic operation takes its own stream so
/// callers can parallelize across particles or trials deterministically.
using RngStream = std::mt19937_64;

/// splitmix64 finalizer; a bijection on 64-bit words.
inline std::uint64_t mix_bits(std::uint64_t v) {
  v += 0x9E3779B97F4A7C15ull;
  v = (v ^ (v >> 30)) * 0xBF58476D1CE4E5B9ull;
  v = (v ^ (v >> 27)) * 0x94D049BB133111EBull;
  return v ^ (v >> 31);
}

/// Counter-based child-seed scheme: child(i) = mix(master + GAMMA * (i + 1)).
/// GAMMA is odd, so distinct indices map to distinct seeds for a fixed master.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix_bits(master + 0x9E3779B97F4A7C15ull * (index + 1));
}

inline RngStream make_stream(std::uint64_t seed) { return RngStream{seed}; }

}  // namespace auvloc
