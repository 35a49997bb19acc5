// Independent reference implementations used as test oracles. These stay
// deliberately naive (full recomputation per step) and share no code with
// the library paths they check.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "iccon/catalogue.hpp"

namespace oracles {

/// Perfect-LFU reference: recomputes the full top-c residency from scratch
/// after every access, i.e. the residency rule taken literally.
class BruteLfu {
 public:
  explicit BruteLfu(std::size_t capacity) : capacity_(capacity) {}

  bool access(iccon::ContentId item) {
    const bool hit = resident_.contains(item);
    auto& e = stats_[item];
    e.count += 1;
    e.tick = ++tick_;
    recompute();
    return hit;
  }

  const std::set<iccon::ContentId>& resident() const { return resident_; }

 private:
  struct Entry {
    std::uint64_t count = 0;
    std::uint64_t tick = 0;
  };

  void recompute() {
    std::vector<std::pair<iccon::ContentId, Entry>> all(stats_.begin(), stats_.end());
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
      if (a.second.count != b.second.count) return a.second.count > b.second.count;
      if (a.second.tick != b.second.tick) return a.second.tick > b.second.tick;
      return a.first < b.first;
    });
    resident_.clear();
    for (std::size_t i = 0; i < all.size() && i < capacity_; ++i)
      resident_.insert(all[i].first);
  }

  std::size_t capacity_;
  std::map<iccon::ContentId, Entry> stats_;
  std::set<iccon::ContentId> resident_;
  std::uint64_t tick_ = 0;
};

/// LRU reference: plain recency list.
class BruteLru {
 public:
  explicit BruteLru(std::size_t capacity) : capacity_(capacity) {}

  bool access(iccon::ContentId item) {
    const auto it = std::find(order_.begin(), order_.end(), item);
    if (it != order_.end()) {
      order_.erase(it);
      order_.insert(order_.begin(), item);
      return true;
    }
    if (capacity_ == 0) return false;
    if (order_.size() == capacity_) order_.pop_back();
    order_.insert(order_.begin(), item);
    return false;
  }

  /// Most recently used first.
  const std::vector<iccon::ContentId>& order() const { return order_; }

  std::set<iccon::ContentId> resident() const {
    return std::set<iccon::ContentId>(order_.begin(), order_.end());
  }

 private:
  std::size_t capacity_;
  std::vector<iccon::ContentId> order_;
};

}  // namespace oracles
