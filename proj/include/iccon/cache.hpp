#pragma once

#include <cassert>
#include <cstdint>
#include <list>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "iccon/catalogue.hpp"
#include "iccon/errors.hpp"

namespace iccon {

/// Result of a single cache access. `admitted` is set when the requested
/// item entered the resident set; `evicted` names the item it displaced.
struct AccessOutcome {
  bool hit = false;
  std::optional<ContentId> admitted;
  std::optional<ContentId> evicted;
};

/// Immutable snapshot of a cache's resident set, taken after `taken_at`
/// accesses. Items are sorted by rank.
class CacheIndex {
 public:
  CacheIndex() = default;
  CacheIndex(std::vector<ContentId> items, std::uint64_t taken_at)
      : items_(std::move(items)), taken_at_(taken_at) {}

  const std::vector<ContentId>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  std::uint64_t taken_at() const { return taken_at_; }

  bool contains(ContentId id) const {
    return std::binary_search(items_.begin(), items_.end(), id);
  }

 private:
  std::vector<ContentId> items_;
  std::uint64_t taken_at_ = 0;
};

/// Perfect LFU: request counters are retained for every item ever seen
/// (a virtual full index); the resident set is the top-capacity items under
/// (count desc, last-access tick desc, rank asc). A missed item is admitted
/// only if it is at least as strong as the weakest resident under that
/// order; the fresh access tick then wins count ties for the incoming item.
class LfuCache {
 public:
  LfuCache(std::size_t capacity, std::size_t id_bound)
      : capacity_(capacity), stats_(id_bound + 1) {}

  AccessOutcome access(ContentId item) {
    assert(item >= 1 && item < stats_.size());
    Stats& s = stats_[item];
    const bool was_resident = s.resident;
    ++accesses_;
    if (was_resident) order_.erase(Key{s.count, s.tick, item});
    ++s.count;
    s.tick = ++tick_;

    AccessOutcome out;
    out.hit = was_resident;
    if (was_resident) {
      ++hits_;
      order_.insert(Key{s.count, s.tick, item});
      return out;
    }
    if (capacity_ == 0) return out;
    if (order_.size() < capacity_) {
      s.resident = true;
      order_.insert(Key{s.count, s.tick, item});
      out.admitted = item;
      return out;
    }
    const Key weakest = *order_.begin();
    const Key incoming{s.count, s.tick, item};
    if (WeakerThan{}(weakest, incoming)) {
      order_.erase(order_.begin());
      stats_[weakest.id].resident = false;
      s.resident = true;
      order_.insert(incoming);
      out.admitted = item;
      out.evicted = weakest.id;
    }
    assert(order_.size() <= capacity_);
    return out;
  }

  CacheIndex index() const {
    std::vector<ContentId> items;
    items.reserve(order_.size());
    for (const Key& k : order_) items.push_back(k.id);
    std::sort(items.begin(), items.end());
    return CacheIndex(std::move(items), accesses_);
  }

  bool resident(ContentId item) const { return stats_[item].resident; }
  std::uint64_t count(ContentId item) const { return stats_[item].count; }

  std::size_t size() const { return order_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::uint64_t hits() const { return hits_; }
  std::uint64_t accesses() const { return accesses_; }

 private:
  struct Key {
    std::uint64_t count;
    std::uint64_t tick;
    ContentId id;
  };
  // Weakest first: lowest count, then oldest access, then largest rank.
  struct WeakerThan {
    bool operator()(const Key& a, const Key& b) const {
      if (a.count != b.count) return a.count < b.count;
      if (a.tick != b.tick) return a.tick < b.tick;
      return a.id > b.id;
    }
  };
  struct Stats {
    std::uint64_t count = 0;
    std::uint64_t tick = 0;
    bool resident = false;
  };

  std::size_t capacity_;
  std::vector<Stats> stats_;
  std::set<Key, WeakerThan> order_;
  std::uint64_t tick_ = 0;
  std::uint64_t hits_ = 0;
  std::uint64_t accesses_ = 0;
};

/// Textbook LRU over item identifiers.
class LruCache {
 public:
  LruCache(std::size_t capacity, std::size_t id_bound)
      : capacity_(capacity), slots_(id_bound + 1) {}

  AccessOutcome access(ContentId item) {
    assert(item >= 1 && item < slots_.size());
    ++accesses_;
    AccessOutcome out;
    Slot& slot = slots_[item];
    if (slot.resident) {
      ++hits_;
      out.hit = true;
      order_.splice(order_.begin(), order_, slot.where);
      return out;
    }
    if (capacity_ == 0) return out;
    if (order_.size() == capacity_) {
      const ContentId victim = order_.back();
      order_.pop_back();
      slots_[victim].resident = false;
      out.evicted = victim;
    }
    order_.push_front(item);
    slot.where = order_.begin();
    slot.resident = true;
    out.admitted = item;
    assert(order_.size() <= capacity_);
    return out;
  }

  CacheIndex index() const {
    std::vector<ContentId> items(order_.begin(), order_.end());
    std::sort(items.begin(), items.end());
    return CacheIndex(std::move(items), accesses_);
  }

  bool resident(ContentId item) const { return slots_[item].resident; }

  /// Resident items, most recently used first.
  std::vector<ContentId> recency_order() const {
    return std::vector<ContentId>(order_.begin(), order_.end());
  }

  std::size_t size() const { return order_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::uint64_t hits() const { return hits_; }
  std::uint64_t accesses() const { return accesses_; }

 private:
  struct Slot {
    std::list<ContentId>::iterator where;
    bool resident = false;
  };

  std::size_t capacity_;
  std::vector<Slot> slots_;
  std::list<ContentId> order_;
  std::uint64_t hits_ = 0;
  std::uint64_t accesses_ = 0;
};

enum class CachePolicy { kLfu, kLru };

/// Runtime-selected cache policy with value semantics.
class Cache {
 public:
  Cache(CachePolicy policy, std::size_t capacity, std::size_t id_bound)
      : impl_(policy == CachePolicy::kLfu
                  ? Impl(LfuCache(capacity, id_bound))
                  : Impl(LruCache(capacity, id_bound))) {}

  AccessOutcome access(ContentId item) {
    return std::visit([&](auto& c) { return c.access(item); }, impl_);
  }
  CacheIndex index() const {
    return std::visit([](const auto& c) { return c.index(); }, impl_);
  }
  bool resident(ContentId item) const {
    return std::visit([&](const auto& c) { return c.resident(item); }, impl_);
  }
  std::size_t size() const {
    return std::visit([](const auto& c) { return c.size(); }, impl_);
  }
  std::size_t capacity() const {
    return std::visit([](const auto& c) { return c.capacity(); }, impl_);
  }
  std::uint64_t hits() const {
    return std::visit([](const auto& c) { return c.hits(); }, impl_);
  }
  std::uint64_t accesses() const {
    return std::visit([](const auto& c) { return c.accesses(); }, impl_);
  }

 private:
  using Impl = std::variant<LfuCache, LruCache>;
  Impl impl_;
};

/// Analytic steady state of a perfect-LFU cache under catalogue-wide Zipf
/// requests: the cache ends up holding the top-c items, so the hit ratio is
/// the mass of those ranks.
inline double steady_state_lfu_chr(const ZipfCatalogue& catalogue, std::size_t cache_size) {
  if (cache_size > catalogue.size())
    throw ConfigError("cache size exceeds catalogue size");
  return catalogue.top_mass(cache_size);
}

}  // namespace iccon
