#pragma once

#include <cstdint>
#include <random>

namespace cramerlab {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Child seed for work unit `index` under `master`:
///   splitmix64(splitmix64(master) ^ splitmix64(index + 1)).
/// Every stream in the library is seeded through this function, so results
/// depend on (master, index) only and never on scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 1));
}

/// Portable random stream: mt19937_64 bits with library-defined conversions
/// (the standard distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  /// Uniform on the open interval (0, 1) with 53-bit resolution.
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  /// ±1 with equal probability.
  int sign() { return (engine_() >> 63) != 0 ? 1 : -1; }

  /// Standard normal by inversion.
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace cramerlab
