#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace marichain {

// Deterministic randomness for the whole simulator. Every consumer owns a
// substream derived from (scenario seed, role label), so adding draws to one
// subsystem never shifts the sequence seen by another.
//
// std::uniform_* distributions are implementation-defined, so the mappings
// from raw engine output to doubles are spelled out here; sequences are
// identical across platforms and compilers for a given seed.

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Substream for `label`, decorrelated from the base seed and other labels.
  static Rng substream(std::uint64_t seed, std::string_view label) {
    std::uint64_t state = seed ^ fnv1a64(label);
    return Rng(splitmix64(state));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

private:
  std::mt19937_64 engine_;
};

}  // namespace marichain
