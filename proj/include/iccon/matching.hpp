#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <unordered_map>
#include <vector>

#include "iccon/cache.hpp"
#include "iccon/catalogue.hpp"
#include "iccon/errors.hpp"

namespace iccon {

/// Scores for one AP: match ratio f, load term l, and the combined fit
/// F = w·f + (1-w)·l.
struct FitScore {
  std::size_t ap = 0;
  double match = 0.0;
  double load = 0.0;
  double fit = 0.0;
};

/// Number of common items between a sorted profile and a sorted index.
inline std::size_t intersection_size(std::span<const ContentId> a, std::span<const ContentId> b) {
  std::size_t n = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++n;
      ++ia;
      ++ib;
    }
  }
  return n;
}

/// Match term f: the fraction of the profile's items present in the index.
inline double profile_match(const UeProfile& profile, const CacheIndex& index) {
  if (profile.size() == 0) throw ConfigError("profile_match: empty profile");
  const std::size_t common = intersection_size(profile.items(), index.items());
  return static_cast<double>(common) / static_cast<double>(profile.size());
}

/// Load term l = 1 - n_ap / sum(n). When no users are attached anywhere the
/// formula is 0/0; every AP then gets l = 1 (an idle AP is maximally
/// attractive, and a shared constant preserves the argmax).
inline double load_term(std::size_t ap, std::span<const std::uint64_t> users_per_ap) {
  if (users_per_ap.empty()) throw ConfigError("load_term: no APs");
  const std::uint64_t total =
      std::accumulate(users_per_ap.begin(), users_per_ap.end(), std::uint64_t{0});
  if (total == 0) return 1.0;
  return 1.0 - static_cast<double>(users_per_ap[ap]) / static_cast<double>(total);
}

/// F = w·f + (1-w)·l. All three inputs must lie in [0, 1].
inline double fit_score(double match, double load, double weight) {
  if (!(match >= 0.0 && match <= 1.0)) throw ConfigError("fit_score: match term out of [0,1]");
  if (!(load >= 0.0 && load <= 1.0)) throw ConfigError("fit_score: load term out of [0,1]");
  if (!(weight >= 0.0 && weight <= 1.0)) throw ConfigError("fit_score: weight out of [0,1]");
  return weight * match + (1.0 - weight) * load;
}

/// Index of the largest score; ties go to the lowest index.
inline std::size_t best_index(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

/// Picks the AP with the best F given per-AP match terms and attachment
/// counts. Ties break toward the lowest AP identifier.
inline FitScore best_fit(std::span<const double> match_per_ap,
                         std::span<const std::uint64_t> users_per_ap, double weight) {
  const std::uint64_t total =
      std::accumulate(users_per_ap.begin(), users_per_ap.end(), std::uint64_t{0});
  FitScore best;
  for (std::size_t ap = 0; ap < match_per_ap.size(); ++ap) {
    const double l =
        total == 0 ? 1.0
                   : 1.0 - static_cast<double>(users_per_ap[ap]) / static_cast<double>(total);
    const double f = fit_score(match_per_ap[ap], l, weight);
    if (ap == 0 || f > best.fit) {
      best = FitScore{ap, match_per_ap[ap], l, f};
    }
  }
  return best;
}

/// Full AP selection: computes f against each AP's cache index (APs sharing
/// a cache pass the same index) and returns the argmax-F AP with its scores.
inline FitScore select_ap(const UeProfile& profile, std::span<const CacheIndex* const> indexes,
                          std::span<const std::uint64_t> users_per_ap, double weight) {
  if (indexes.empty()) throw ConfigError("select_ap: no APs");
  std::vector<double> match(indexes.size());
  for (std::size_t ap = 0; ap < indexes.size(); ++ap) {
    match[ap] = profile_match(profile, *indexes[ap]);
  }
  return best_fit(match, users_per_ap, weight);
}

/// UE-side popularity tracker: per-item request counters with no payload and
/// no capacity bound, ordered like the LFU residency rule.
class VirtualCacheProfiler {
 public:
  void record(ContentId item) {
    Entry& e = counts_[item];
    ++e.count;
    e.tick = ++tick_;
  }

  std::uint64_t count(ContentId item) const {
    const auto it = counts_.find(item);
    return it == counts_.end() ? 0 : it->second.count;
  }

  std::size_t distinct_items() const { return counts_.size(); }
  std::uint64_t recorded() const { return tick_; }

  /// The k strongest items under (count desc, last tick desc, rank asc),
  /// or all recorded items when fewer than k exist, as a UeProfile with
  /// weights renormalized from the catalogue.
  UeProfile top(std::size_t k, const ZipfCatalogue& catalogue) const {
    if (k == 0) throw ConfigError("profiler top: k must be at least 1");
    if (counts_.empty()) throw ConfigError("profiler top: nothing recorded yet");
    struct Ranked {
      ContentId id;
      std::uint64_t count;
      std::uint64_t tick;
    };
    std::vector<Ranked> ranked;
    ranked.reserve(counts_.size());
    for (const auto& [id, e] : counts_) ranked.push_back({id, e.count, e.tick});
    std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
      if (a.count != b.count) return a.count > b.count;
      if (a.tick != b.tick) return a.tick > b.tick;
      return a.id < b.id;
    });
    if (ranked.size() > k) ranked.resize(k);
    std::vector<ContentId> items;
    items.reserve(ranked.size());
    for (const Ranked& r : ranked) items.push_back(r.id);
    return UeProfile(std::move(items), catalogue);
  }

 private:
  struct Entry {
    std::uint64_t count = 0;
    std::uint64_t tick = 0;
  };
  std::unordered_map<ContentId, Entry> counts_;
  std::uint64_t tick_ = 0;
};

}  // namespace iccon
