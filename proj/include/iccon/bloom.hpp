#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "iccon/cache.hpp"
#include "iccon/catalogue.hpp"
#include "iccon/errors.hpp"
#include "iccon/rng.hpp"

namespace iccon {

/// Bloom filter over content identifiers. Bit positions come from seeded
/// double hashing: position_i = (h1 + i * step) mod m for i in [0, k).
/// Guarantees no false negatives; the false-positive rate follows the
/// standard (1 - e^{-k n / m})^k estimate.
class BloomFilter {
 public:
  static constexpr std::uint64_t kDefaultSeed = 0x1CC0FB10u;

  BloomFilter(std::size_t bit_count, unsigned hash_count, std::uint64_t seed = kDefaultSeed)
      : bit_count_(bit_count), hash_count_(hash_count), seed_(seed),
        words_((bit_count + 63) / 64) {
    if (bit_count == 0) throw ConfigError("bloom filter needs at least 1 bit");
    if (hash_count == 0) throw ConfigError("bloom filter needs at least 1 hash");
  }

  void insert(ContentId id) {
    for_each_position(id, [&](std::size_t pos) { words_[pos >> 6] |= 1ULL << (pos & 63); });
    ++inserted_;
  }

  bool contains(ContentId id) const {
    bool all = true;
    for_each_position(id, [&](std::size_t pos) {
      all = all && ((words_[pos >> 6] >> (pos & 63)) & 1ULL);
    });
    return all;
  }

  std::size_t bit_count() const { return bit_count_; }
  unsigned hash_count() const { return hash_count_; }
  std::size_t inserted() const { return inserted_; }

  /// Estimated false-positive rate at the current fill level.
  double estimated_fpr() const { return theoretical_fpr(bit_count_, inserted_, hash_count_); }

  /// round((m/n)·ln 2), at least 1.
  static unsigned optimal_hash_count(std::size_t bit_count, std::size_t expected_items) {
    if (bit_count == 0 || expected_items == 0)
      throw ConfigError("optimal_hash_count: bit and item counts must be at least 1");
    const double k = std::round(static_cast<double>(bit_count) /
                                static_cast<double>(expected_items) * std::numbers::ln2_v<double>);
    return k < 1.0 ? 1u : static_cast<unsigned>(k);
  }

  /// (1 - e^{-k n / m})^k.
  static double theoretical_fpr(std::size_t bit_count, std::size_t item_count,
                                unsigned hash_count) {
    if (bit_count == 0 || hash_count == 0)
      throw ConfigError("theoretical_fpr: bit and hash counts must be at least 1");
    const double exponent = -static_cast<double>(hash_count) * static_cast<double>(item_count) /
                            static_cast<double>(bit_count);
    return std::pow(-std::expm1(exponent), static_cast<double>(hash_count));
  }

  /// Encodes a cache index into a fresh filter with the optimal hash count
  /// for the index's size.
  static BloomFilter encode(const CacheIndex& index, std::size_t bit_count,
                            std::uint64_t seed = kDefaultSeed) {
    const std::size_t n = index.size() == 0 ? 1 : index.size();
    BloomFilter bf(bit_count, optimal_hash_count(bit_count, n), seed);
    for (ContentId id : index.items()) bf.insert(id);
    return bf;
  }

 private:
  template <typename Fn>
  void for_each_position(ContentId id, Fn&& fn) const {
    const std::uint64_t h1 = mix64(seed_ ^ static_cast<std::uint64_t>(id));
    const std::uint64_t h2 = mix64(h1 ^ 0x9E3779B97F4A7C15ULL);
    const std::size_t base = static_cast<std::size_t>(h1 % bit_count_);
    const std::size_t step =
        bit_count_ > 1 ? static_cast<std::size_t>(1 + h2 % (bit_count_ - 1)) : 0;
    std::size_t pos = base;
    for (unsigned i = 0; i < hash_count_; ++i) {
      fn(pos);
      pos += step;
      if (pos >= bit_count_) pos -= bit_count_;
    }
  }

  std::size_t bit_count_;
  unsigned hash_count_;
  std::uint64_t seed_;
  std::vector<std::uint64_t> words_;
  std::size_t inserted_ = 0;
};

/// Bloom-based approximation of the match term: the fraction of profile
/// items the filter reports present. Never below the exact f for the
/// encoded index (no false negatives).
inline double approx_match(const UeProfile& profile, const BloomFilter& index_filter) {
  if (profile.size() == 0) throw ConfigError("approx_match: empty profile");
  std::size_t found = 0;
  for (ContentId id : profile.items()) {
    if (index_filter.contains(id)) ++found;
  }
  return static_cast<double>(found) / static_cast<double>(profile.size());
}

}  // namespace iccon
