#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace iccon {

/// SplitMix64 finalizer; used for seed derivation so that substreams are
/// decorrelated regardless of the order in which they are created.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  return mix64(mix64(seed) ^ mix64(salt));
}

/// Deterministic random stream: a std::mt19937_64 engine (whose output
/// sequence is fixed by the standard) with hand-rolled value mappings, so
/// draw sequences are identical across standard-library implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1), 53 random bits.
  double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound). bound must be nonzero. Unbiased (rejection).
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
    for (;;) {
      const std::uint64_t r = engine_();
      if (r >= threshold) return r % bound;
    }
  }

  /// Exponential variate with the given rate (rate > 0).
  double next_exponential(double rate) {
    // next_unit() < 1, so the argument to log1p stays in (-1, 0].
    return -std::log1p(-next_unit()) / rate;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace iccon
