#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>

namespace sentinel {

/// splitmix64 finalizer; used to derive independent seeds from a master
/// seed and an index.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seeded generator whose outputs are fixed by the engine alone (no
/// library-specific distribution objects), so streams match across
/// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on {0, ..., n - 1}.
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
  }

  /// Exponential with unit rate.
  double exponential() { return -std::log1p(-uniform()); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sentinel
