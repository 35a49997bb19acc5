#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iccon/cache.hpp"
#include "iccon/catalogue.hpp"
#include "iccon/errors.hpp"
#include "iccon/matching.hpp"
#include "iccon/rng.hpp"

namespace iccon {

enum class SelectionPolicy { kIccon, kRandom };
enum class Topology { kPerAp, kShared };

inline const char* to_string(SelectionPolicy p) {
  return p == SelectionPolicy::kIccon ? "iccon" : "random";
}
inline const char* to_string(CachePolicy p) { return p == CachePolicy::kLfu ? "lfu" : "lru"; }
inline const char* to_string(Topology t) { return t == Topology::kPerAp ? "per-ap" : "shared"; }

/// Between churn events caches are run until their hit ratio settles: a
/// cache is stable once the CHR over its two most recent disjoint windows
/// of window_mult*c of its own requests differ by less than epsilon. A
/// cache that reaches cap_mult*c requests within one phase is forcibly
/// treated as stable and the phase is flagged as capped.
struct StabilizationConfig {
  std::size_t window_mult = 10;
  double epsilon = 0.005;
  std::size_t cap_mult = 100;
};

struct SimConfig {
  std::size_t ue_count = 0;        // N
  std::size_t ap_count = 0;        // M
  std::size_t catalogue_size = 0;  // C
  std::size_t cache_size = 0;      // c, items
  double slope = 0.0;              // s
  double request_rate = 0.0;       // lambda_c, requests/second per UE
  double churn_rate = 0.0;         // lambda_v, users/second
  std::size_t profile_count = 0;   // U
  std::size_t profile_size = 0;    // u, items
  double fit_weight = 0.0;         // w
  SelectionPolicy policy = SelectionPolicy::kIccon;
  CachePolicy cache_policy = CachePolicy::kLfu;
  Topology topology = Topology::kPerAp;
  std::uint64_t seed = 1;
  StabilizationConfig stabilization;

  void validate() const {
    if (ue_count < 3) throw ConfigError("N must be at least 3");
    if (ap_count < 1) throw ConfigError("M must be at least 1");
    if (catalogue_size < 1) throw ConfigError("C must be at least 1");
    if (cache_size == 0 || cache_size >= catalogue_size)
      throw ConfigError("c must satisfy 0 < c < C");
    if (slope < 0.0) throw ConfigError("s must be non-negative");
    if (request_rate <= 0.0) throw ConfigError("lambda_c must be positive");
    if (churn_rate <= 0.0) throw ConfigError("lambda_v must be positive");
    if (profile_count < 1) throw ConfigError("U must be at least 1");
    if (profile_size == 0 || profile_size > catalogue_size)
      throw ConfigError("u must satisfy 1 <= u <= C");
    if (fit_weight < 0.0 || fit_weight > 1.0) throw ConfigError("w must lie in [0, 1]");
    if (stabilization.window_mult == 0) throw ConfigError("stab_window_mult must be positive");
    if (stabilization.epsilon <= 0.0) throw ConfigError("stab_eps must be positive");
    if (stabilization.cap_mult == 0) throw ConfigError("stab_cap_mult must be positive");
  }
};

/// hits / requests; absent when no requests were made.
inline std::optional<double> measure_chr(std::uint64_t hits, std::uint64_t requests) {
  if (requests == 0) return std::nullopt;
  return static_cast<double>(hits) / static_cast<double>(requests);
}

struct MetricsRow {
  std::size_t event_index = 0;  // churn step or slot, 1-based
  std::uint64_t requests = 0;
  std::uint64_t hits = 0;
  std::optional<double> chr;             // over this row's requests
  std::optional<double> chr_cumulative;  // since the scenario started
  std::vector<std::uint64_t> per_ap_users;
};

struct MetricsSeries {
  std::vector<MetricsRow> rows;
  std::uint64_t warmup_requests = 0;
  std::uint64_t warmup_hits = 0;
  bool warmup_capped = false;
};

/// Single-replica simulation world: one catalogue, U profiles, M APs backed
/// by per-AP or shared caches, and a FIFO population of UEs.
///
/// Randomness is split into fixed substreams so traces can be reproduced
/// externally: profile sets come from a stream seeded with setup_seed(seed);
/// requester picks, inter-arrival times, profile assignment and random
/// attachment all come from a stream seeded with event_seed(seed); each UE
/// draws its own requests from a stream seeded with ue_seed(seed, ue id).
/// Per request the event-stream draw order is: requester index, then (churn
/// mode only) the exponential inter-arrival step; a random-policy AP pick
/// happens at arrival (churn) or before the item draw (per-request mode).
class Simulation {
 public:
  explicit Simulation(const SimConfig& cfg)
      : cfg_(validated(cfg)),
        catalogue_(cfg.catalogue_size, cfg.slope),
        profile_selector_(cfg.profile_count, cfg.slope),
        event_rng_(event_seed(cfg.seed)) {
    RandomStream setup_rng(setup_seed(cfg_.seed));
    profiles_ = generate_profiles(catalogue_, cfg_.profile_count, cfg_.profile_size, setup_rng);
    const std::size_t cache_count = cfg_.topology == Topology::kShared ? 1 : cfg_.ap_count;
    caches_.reserve(cache_count);
    for (std::size_t i = 0; i < cache_count; ++i)
      caches_.emplace_back(cfg_.cache_policy, cfg_.cache_size, cfg_.catalogue_size);
    ap_cache_.resize(cfg_.ap_count);
    for (std::size_t ap = 0; ap < cfg_.ap_count; ++ap)
      ap_cache_[ap] = cfg_.topology == Topology::kShared ? 0 : ap;
    ap_users_.assign(cfg_.ap_count, 0);
  }

  static std::uint64_t setup_seed(std::uint64_t seed) { return derive_seed(seed, 0x5E70); }
  static std::uint64_t event_seed(std::uint64_t seed) { return derive_seed(seed, 0xE7E7); }
  static std::uint64_t ue_seed(std::uint64_t seed, std::uint64_t ue_id) {
    return derive_seed(seed, 0x0E00 + ue_id);
  }

  struct PhaseStats {
    std::uint64_t requests = 0;
    std::uint64_t hits = 0;
    bool capped = false;
  };

  /// Creates floor(N/3) UEs attached to uniformly random APs and runs
  /// requests until every cache is stable (or capped).
  PhaseStats run_warmup() {
    if (warmed_) throw RuntimeError("warm-up already ran");
    const std::size_t initial = cfg_.ue_count / 3;
    for (std::size_t i = 0; i < initial; ++i) spawn_ue(SelectionPolicy::kRandom);
    const PhaseStats phase = stabilize();
    warmup_ = phase;
    warmed_ = true;
    return phase;
  }

  /// One churn event: the oldest UE departs, a new one arrives and attaches
  /// per the configured policy, then caches stabilize again.
  MetricsRow churn_step() {
    if (ues_.empty()) throw RuntimeError("churn_step: no UEs in the system");
    --ap_users_[ues_.front().ap];
    ues_.pop_front();
    spawn_ue(cfg_.policy);
    const PhaseStats phase = stabilize();
    any_step_capped_ = any_step_capped_ || phase.capped;
    churn_requests_ += phase.requests;
    churn_hits_ += phase.hits;
    MetricsRow row;
    row.event_index = ++steps_;
    row.requests = phase.requests;
    row.hits = phase.hits;
    row.chr = measure_chr(phase.hits, phase.requests);
    row.chr_cumulative = measure_chr(churn_hits_, churn_requests_);
    row.per_ap_users.assign(ap_users_.begin(), ap_users_.end());
    return row;
  }

  /// Full churn scenario: warm-up followed by floor(2N/3) departure/arrival
  /// events. The population stays at floor(N/3) throughout.
  MetricsSeries run_churn() {
    MetricsSeries series;
    const PhaseStats warm = run_warmup();
    series.warmup_requests = warm.requests;
    series.warmup_hits = warm.hits;
    series.warmup_capped = warm.capped;
    const std::size_t steps = 2 * cfg_.ue_count / 3;
    series.rows.reserve(steps);
    for (std::size_t i = 0; i < steps; ++i) series.rows.push_back(churn_step());
    return series;
  }

  /// Per-request decision mode: a fixed population of floor(N/3) UEs, no
  /// attachment; every request is delivered to the argmax-F AP, where the
  /// load term counts requests routed within the current slot.
  MetricsSeries run_per_request(std::size_t slots, std::uint64_t requests_per_slot) {
    if (warmed_ || !ues_.empty()) throw RuntimeError("per-request mode needs a fresh world");
    if (slots == 0 || requests_per_slot == 0)
      throw ConfigError("per-request mode needs at least one slot and one request per slot");
    const std::size_t population = cfg_.ue_count / 3;
    for (std::size_t i = 0; i < population; ++i) spawn_detached_ue();

    MatchCounts match(profiles_, cfg_.catalogue_size, caches_.size());
    std::vector<std::uint64_t> slot_requests(cfg_.ap_count, 0);
    std::vector<double> match_per_ap(cfg_.ap_count, 0.0);
    const double inv_profile_size = 1.0 / static_cast<double>(cfg_.profile_size);

    MetricsSeries series;
    series.rows.reserve(slots);
    std::uint64_t cumulative_requests = 0, cumulative_hits = 0;
    for (std::size_t slot = 1; slot <= slots; ++slot) {
      std::fill(slot_requests.begin(), slot_requests.end(), 0);
      std::uint64_t slot_hits = 0;
      for (std::uint64_t n = 0; n < requests_per_slot; ++n) {
        Ue& ue = ues_[event_rng_.next_below(ues_.size())];
        std::size_t ap = 0;
        if (cfg_.policy == SelectionPolicy::kIccon) {
          for (std::size_t a = 0; a < cfg_.ap_count; ++a) {
            match_per_ap[a] =
                static_cast<double>(match.count(ue.profile, ap_cache_[a])) * inv_profile_size;
          }
          ap = best_fit(match_per_ap, slot_requests, cfg_.fit_weight).ap;
        } else {
          ap = static_cast<std::size_t>(event_rng_.next_below(cfg_.ap_count));
        }
        const ContentId item = profiles_[ue.profile].sample(ue.stream);
        const std::size_t cache_id = ap_cache_[ap];
        const AccessOutcome outcome = caches_[cache_id].access(item);
        if (cfg_.policy == SelectionPolicy::kIccon) match.apply(cache_id, outcome);
        ++slot_requests[ap];
        ++total_requests_;
        if (outcome.hit) {
          ++slot_hits;
          ++total_hits_;
        }
      }
      cumulative_requests += requests_per_slot;
      cumulative_hits += slot_hits;
      MetricsRow row;
      row.event_index = slot;
      row.requests = requests_per_slot;
      row.hits = slot_hits;
      row.chr = measure_chr(slot_hits, requests_per_slot);
      row.chr_cumulative = measure_chr(cumulative_hits, cumulative_requests);
      row.per_ap_users = slot_requests;
      series.rows.push_back(row);
    }
    return series;
  }

  static MetricsSeries run_churn_scenario(const SimConfig& cfg) {
    return Simulation(cfg).run_churn();
  }
  static MetricsSeries run_per_request_scenario(const SimConfig& cfg, std::size_t slots,
                                                std::uint64_t requests_per_slot) {
    return Simulation(cfg).run_per_request(slots, requests_per_slot);
  }

  const SimConfig& config() const { return cfg_; }
  const ZipfCatalogue& catalogue() const { return catalogue_; }
  std::span<const UeProfile> profiles() const { return profiles_; }
  std::size_t cache_count() const { return caches_.size(); }
  const Cache& cache(std::size_t i) const { return caches_[i]; }
  std::size_t cache_of_ap(std::size_t ap) const { return ap_cache_[ap]; }
  std::span<const std::uint64_t> ap_users() const { return ap_users_; }
  std::uint64_t total_requests() const { return total_requests_; }
  std::uint64_t total_hits() const { return total_hits_; }
  bool any_step_capped() const { return any_step_capped_; }
  double now() const { return now_; }

  struct UeView {
    std::uint64_t id;
    std::size_t profile;
    std::size_t attached_ap;
  };
  std::vector<UeView> ues() const {
    std::vector<UeView> out;
    out.reserve(ues_.size());
    for (const Ue& ue : ues_) out.push_back({ue.id, ue.profile, ue.ap});
    return out;
  }

 private:
  static const SimConfig& validated(const SimConfig& cfg) {
    cfg.validate();
    return cfg;
  }

  struct Ue {
    std::uint64_t id;
    std::size_t profile;
    std::size_t ap;  // unused in per-request mode
    std::uint64_t arrival;
    RandomStream stream;
  };

  /// Incremental |profile ∩ resident| counters, maintained from cache
  /// admissions/evictions via an item -> profiles reverse index. Keeps the
  /// per-request decision loop O(M) instead of O(M * u).
  class MatchCounts {
   public:
    MatchCounts(std::span<const UeProfile> profiles, std::size_t catalogue_size,
                std::size_t cache_count)
        : cache_count_(cache_count),
          item_profiles_(catalogue_size + 1),
          counts_(profiles.size() * cache_count, 0) {
      for (std::size_t p = 0; p < profiles.size(); ++p) {
        for (ContentId id : profiles[p].items())
          item_profiles_[id].push_back(static_cast<std::uint32_t>(p));
      }
    }

    std::uint32_t count(std::size_t profile, std::size_t cache) const {
      return counts_[profile * cache_count_ + cache];
    }

    void apply(std::size_t cache, const AccessOutcome& outcome) {
      if (outcome.admitted) {
        for (std::uint32_t p : item_profiles_[*outcome.admitted]) ++counts_[p * cache_count_ + cache];
      }
      if (outcome.evicted) {
        for (std::uint32_t p : item_profiles_[*outcome.evicted]) --counts_[p * cache_count_ + cache];
      }
    }

   private:
    std::size_t cache_count_;
    std::vector<std::vector<std::uint32_t>> item_profiles_;
    std::vector<std::uint32_t> counts_;
  };

  void spawn_ue(SelectionPolicy attach_policy) {
    const std::uint64_t id = next_ue_id_++;
    const std::size_t profile = pick_profile(profile_selector_, event_rng_);
    std::size_t ap = 0;
    if (attach_policy == SelectionPolicy::kIccon) {
      std::vector<CacheIndex> snapshots;
      snapshots.reserve(caches_.size());
      for (const Cache& c : caches_) snapshots.push_back(c.index());
      std::vector<const CacheIndex*> per_ap(cfg_.ap_count);
      for (std::size_t a = 0; a < cfg_.ap_count; ++a) per_ap[a] = &snapshots[ap_cache_[a]];
      ap = select_ap(profiles_[profile], per_ap, ap_users_, cfg_.fit_weight).ap;
    } else {
      ap = static_cast<std::size_t>(event_rng_.next_below(cfg_.ap_count));
    }
    ++ap_users_[ap];
    ues_.push_back(Ue{id, profile, ap, arrivals_++, RandomStream(ue_seed(cfg_.seed, id))});
  }

  void spawn_detached_ue() {
    const std::uint64_t id = next_ue_id_++;
    const std::size_t profile = pick_profile(profile_selector_, event_rng_);
    ues_.push_back(Ue{id, profile, 0, arrivals_++, RandomStream(ue_seed(cfg_.seed, id))});
  }

  /// Runs requests until every cache serving at least one UE is stable or
  /// capped per StabilizationConfig.
  PhaseStats stabilize() {
    const std::size_t window = cfg_.stabilization.window_mult * cfg_.cache_size;
    const std::uint64_t cap =
        static_cast<std::uint64_t>(cfg_.stabilization.cap_mult) * cfg_.cache_size;

    struct Tracker {
      std::uint64_t requests = 0;
      std::uint64_t window_hits = 0;
      std::size_t window_fill = 0;
      double last_window_chr = -1.0;  // <0: no completed window yet
      bool done = false;
      bool capped = false;
    };
    std::vector<Tracker> trackers(caches_.size());
    std::size_t pending = 0;
    {
      std::vector<std::uint64_t> cache_users(caches_.size(), 0);
      for (std::size_t ap = 0; ap < cfg_.ap_count; ++ap) cache_users[ap_cache_[ap]] += ap_users_[ap];
      for (std::size_t i = 0; i < caches_.size(); ++i) {
        trackers[i].done = cache_users[i] == 0;
        if (!trackers[i].done) ++pending;
      }
    }

    PhaseStats phase;
    const double aggregate_rate = static_cast<double>(ues_.size()) * cfg_.request_rate;
    while (pending > 0) {
      Ue& ue = ues_[event_rng_.next_below(ues_.size())];
      now_ += event_rng_.next_exponential(aggregate_rate);
      const ContentId item = profiles_[ue.profile].sample(ue.stream);
      const std::size_t cache_id = ap_cache_[ue.ap];
      const bool hit = caches_[cache_id].access(item).hit;
      ++phase.requests;
      ++total_requests_;
      if (hit) {
        ++phase.hits;
        ++total_hits_;
      }
      Tracker& t = trackers[cache_id];
      if (t.done) continue;
      ++t.requests;
      t.window_hits += hit ? 1 : 0;
      if (++t.window_fill == window) {
        const double chr = static_cast<double>(t.window_hits) / static_cast<double>(window);
        if (t.last_window_chr >= 0.0 &&
            std::abs(chr - t.last_window_chr) < cfg_.stabilization.epsilon) {
          t.done = true;
          --pending;
        }
        t.last_window_chr = chr;
        t.window_fill = 0;
        t.window_hits = 0;
      }
      if (!t.done && t.requests >= cap) {
        t.done = true;
        t.capped = true;
        phase.capped = true;
        --pending;
      }
    }
    return phase;
  }

  SimConfig cfg_;
  ZipfCatalogue catalogue_;
  ZipfCatalogue profile_selector_;
  RandomStream event_rng_;
  std::vector<UeProfile> profiles_;
  std::vector<Cache> caches_;
  std::vector<std::size_t> ap_cache_;
  std::vector<std::uint64_t> ap_users_;
  std::deque<Ue> ues_;  // front = oldest arrival (FIFO departures)
  std::uint64_t next_ue_id_ = 0;
  std::uint64_t arrivals_ = 0;
  std::size_t steps_ = 0;
  double now_ = 0.0;
  std::uint64_t total_requests_ = 0;
  std::uint64_t total_hits_ = 0;
  std::uint64_t churn_requests_ = 0;
  std::uint64_t churn_hits_ = 0;
  PhaseStats warmup_;
  bool warmed_ = false;
  bool any_step_capped_ = false;
};

}  // namespace iccon
