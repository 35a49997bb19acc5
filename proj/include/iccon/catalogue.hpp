#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "iccon/errors.hpp"
#include "iccon/rng.hpp"

namespace iccon {

/// Content items are identified by popularity rank: 1 is the most popular
/// item, C the least popular one.
using ContentId = std::uint32_t;

/// Catalogue of C items under a Zipf-like popularity law p_i = i^{-s} / H,
/// with a cumulative table for O(log C) sampling.
class ZipfCatalogue {
 public:
  ZipfCatalogue(std::size_t item_count, double slope) : size_(item_count), slope_(slope) {
    if (item_count == 0) throw ConfigError("catalogue size must be at least 1");
    if (slope < 0.0) throw ConfigError("Zipf slope must be non-negative");
    long double norm = 0.0L;
    for (std::size_t i = 1; i <= item_count; ++i) {
      norm += std::pow(static_cast<double>(i), -slope);
    }
    norm_ = static_cast<double>(norm);
    cdf_.resize(item_count);
    long double acc = 0.0L;
    for (std::size_t i = 1; i <= item_count; ++i) {
      acc += std::pow(static_cast<double>(i), -slope) / norm;
      cdf_[i - 1] = static_cast<double>(acc);
    }
    cdf_.back() = 1.0;
  }

  std::size_t size() const { return size_; }
  double slope() const { return slope_; }

  /// Normalization constant H = sum over ranks of rank^{-s}.
  double norm() const { return norm_; }

  double probability(ContentId rank) const {
    return std::pow(static_cast<double>(rank), -slope_) / norm_;
  }

  /// Total probability mass of the top `count` ranks.
  double top_mass(std::size_t count) const {
    if (count > size_) throw ConfigError("top_mass: count exceeds catalogue size");
    return count == 0 ? 0.0 : cdf_[count - 1];
  }

  /// Draws a rank with probability p_rank.
  ContentId sample(RandomStream& rng) const {
    const double u = rng.next_unit();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<ContentId>((it - cdf_.begin()) + 1);
  }

 private:
  std::size_t size_;
  double slope_;
  double norm_;
  std::vector<double> cdf_;
};

/// A UE's interest set: u distinct items plus a request distribution over
/// them (the global Zipf weights renormalized over the set). Items are kept
/// sorted by rank, i.e. most popular first.
class UeProfile {
 public:
  UeProfile(std::vector<ContentId> items, const ZipfCatalogue& catalogue)
      : items_(std::move(items)) {
    if (items_.empty()) throw ConfigError("profile must contain at least one item");
    std::sort(items_.begin(), items_.end());
    long double total = 0.0L;
    for (ContentId id : items_) total += catalogue.probability(id);
    weights_.resize(items_.size());
    cdf_.resize(items_.size());
    long double acc = 0.0L;
    for (std::size_t i = 0; i < items_.size(); ++i) {
      const long double w = catalogue.probability(items_[i]) / total;
      weights_[i] = static_cast<double>(w);
      acc += w;
      cdf_[i] = static_cast<double>(acc);
    }
    cdf_.back() = 1.0;
  }

  const std::vector<ContentId>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }

  bool contains(ContentId id) const {
    return std::binary_search(items_.begin(), items_.end(), id);
  }

  /// Request weight of the i-th item (items are ordered most popular first).
  double weight(std::size_t index) const { return weights_[index]; }

  /// Draws one request from the profile's renormalized distribution.
  ContentId sample(RandomStream& rng) const {
    const double u = rng.next_unit();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return items_[static_cast<std::size_t>(it - cdf_.begin())];
  }

 private:
  std::vector<ContentId> items_;
  std::vector<double> weights_;
  std::vector<double> cdf_;
};

namespace detail {

/// Floyd's algorithm: uniform sample of `count` distinct ranks from [1, bound].
inline std::vector<ContentId> sample_distinct(std::size_t bound, std::size_t count,
                                              RandomStream& rng) {
  std::unordered_set<ContentId> chosen;
  chosen.reserve(count * 2);
  for (std::size_t j = bound - count + 1; j <= bound; ++j) {
    const ContentId candidate = static_cast<ContentId>(1 + rng.next_below(j));
    if (!chosen.insert(candidate).second) chosen.insert(static_cast<ContentId>(j));
  }
  std::vector<ContentId> items(chosen.begin(), chosen.end());
  std::sort(items.begin(), items.end());
  return items;
}

}  // namespace detail

/// Generates `profile_count` mutually distinct profiles of exactly
/// `profile_size` items each, chosen uniformly without replacement.
/// Regenerates on set collision, giving up after 1000 attempts per profile.
inline std::vector<UeProfile> generate_profiles(const ZipfCatalogue& catalogue,
                                                std::size_t profile_count,
                                                std::size_t profile_size, RandomStream& rng) {
  if (profile_count == 0) throw ConfigError("profile count must be at least 1");
  if (profile_size == 0 || profile_size > catalogue.size())
    throw ConfigError("profile size must be in [1, C]");
  std::vector<UeProfile> profiles;
  profiles.reserve(profile_count);
  std::set<std::vector<ContentId>> seen;
  for (std::size_t p = 0; p < profile_count; ++p) {
    bool placed = false;
    for (int attempt = 0; attempt < 1000; ++attempt) {
      auto items = detail::sample_distinct(catalogue.size(), profile_size, rng);
      if (seen.insert(items).second) {
        profiles.emplace_back(std::move(items), catalogue);
        placed = true;
        break;
      }
    }
    if (!placed)
      throw ConfigError("could not generate " + std::to_string(profile_count) +
                        " distinct profiles of size " + std::to_string(profile_size));
  }
  return profiles;
}

/// Zipf-weighted profile assignment: profile j (1-based) is chosen with
/// probability j^{-s} / sum over [1, U]. The selector is a ZipfCatalogue
/// over profile indices. Returns a 0-based index into the profile list.
inline std::size_t pick_profile(const ZipfCatalogue& selector, RandomStream& rng) {
  return static_cast<std::size_t>(selector.sample(rng)) - 1;
}

}  // namespace iccon
