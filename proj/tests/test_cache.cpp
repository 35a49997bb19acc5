#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <vector>

#include "iccon/cache.hpp"
#include "iccon/catalogue.hpp"
#include "oracles.hpp"

using namespace iccon;

namespace {

std::set<ContentId> resident_set(const CacheIndex& index) {
  return std::set<ContentId>(index.items().begin(), index.items().end());
}

}  // namespace

TEST_CASE("lfu keeps the more frequent item at capacity 1") {
  LfuCache cache(1, 10);
  const ContentId a = 1, b = 2;
  CHECK_FALSE(cache.access(a).hit);
  CHECK(cache.access(a).hit);
  const AccessOutcome miss = cache.access(b);
  CHECK_FALSE(miss.hit);
  CHECK_FALSE(miss.admitted.has_value());  // b's count 1 < a's count 2
  CHECK(resident_set(cache.index()) == std::set<ContentId>{a});
}

TEST_CASE("lfu replay example ends with the right residents") {
  LfuCache cache(2, 10);
  for (ContentId id : {1, 2, 1, 3, 3, 3}) cache.access(static_cast<ContentId>(id));
  CHECK(resident_set(cache.index()) == std::set<ContentId>{1, 3});
}

TEST_CASE("zero-capacity caches never hit") {
  LfuCache lfu(0, 10);
  LruCache lru(0, 10);
  for (int round = 0; round < 3; ++round) {
    for (ContentId id = 1; id <= 5; ++id) {
      CHECK_FALSE(lfu.access(id).hit);
      CHECK_FALSE(lru.access(id).hit);
    }
  }
  CHECK(lfu.size() == 0);
  CHECK(lru.size() == 0);
}

TEST_CASE("lru textbook traces") {
  SECTION("capacity 2") {
    LruCache cache(2, 10);
    CHECK_FALSE(cache.access(1).hit);
    CHECK_FALSE(cache.access(2).hit);
    CHECK(cache.access(1).hit);
    const AccessOutcome out = cache.access(3);
    CHECK_FALSE(out.hit);
    CHECK(out.evicted == ContentId{2});
    CHECK(resident_set(cache.index()) == std::set<ContentId>{1, 3});
  }
  SECTION("capacity 1 thrashing") {
    LruCache cache(1, 10);
    CHECK_FALSE(cache.access(1).hit);
    CHECK_FALSE(cache.access(2).hit);
    CHECK_FALSE(cache.access(1).hit);
  }
  SECTION("second pass over a fitting working set always hits") {
    RandomStream rng(21);
    std::vector<ContentId> items = {4, 7, 9};
    for (int perm = 0; perm < 6; ++perm) {
      LruCache cache(3, 10);
      for (ContentId id : items) cache.access(id);
      // any revisit order
      for (std::size_t i = items.size(); i-- > 0;) CHECK(cache.access(items[i]).hit);
      std::next_permutation(items.begin(), items.end());
    }
  }
}

TEST_CASE("index snapshots are immutable") {
  LfuCache cache(2, 100);
  CHECK(cache.index().size() == 0);
  cache.access(1);
  cache.access(2);
  const CacheIndex snapshot = cache.index();
  CHECK(resident_set(snapshot) == std::set<ContentId>{1, 2});
  RandomStream rng(22);
  for (int i = 0; i < 100; ++i) cache.access(static_cast<ContentId>(1 + rng.next_below(100)));
  CHECK(resident_set(snapshot) == std::set<ContentId>{1, 2});
  CHECK(snapshot.taken_at() == 2);
}

TEST_CASE("lfu matches the brute-force residency rule on random traces") {
  RandomStream rng(23);
  for (int trial = 0; trial < 8; ++trial) {
    const std::size_t catalogue = 10 + rng.next_below(90);
    const std::size_t capacity = rng.next_below(11);
    LfuCache cache(capacity, catalogue);
    oracles::BruteLfu brute(capacity);
    for (int step = 0; step < 2000; ++step) {
      const ContentId id = static_cast<ContentId>(1 + rng.next_below(catalogue));
      const bool hit = cache.access(id).hit;
      const bool expected = brute.access(id);
      REQUIRE(hit == expected);
      REQUIRE(cache.size() <= capacity);
      REQUIRE(resident_set(cache.index()) == brute.resident());
    }
  }
}

TEST_CASE("no non-resident item ever outranks a resident one") {
  RandomStream rng(24);
  const std::size_t catalogue = 60;
  LfuCache cache(8, catalogue);
  const ZipfCatalogue zipf(catalogue, 0.9);
  for (int step = 0; step < 5000; ++step) {
    cache.access(zipf.sample(rng));
    if (step % 500 != 0) continue;
    std::uint64_t min_resident = UINT64_MAX;
    for (ContentId id = 1; id <= catalogue; ++id)
      if (cache.resident(id)) min_resident = std::min(min_resident, cache.count(id));
    for (ContentId id = 1; id <= catalogue; ++id)
      if (!cache.resident(id)) REQUIRE(cache.count(id) <= min_resident);
  }
}

TEST_CASE("lru matches the brute-force recency list on random traces") {
  RandomStream rng(25);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t catalogue = 5 + rng.next_below(46);
    const std::size_t capacity = 1 + rng.next_below(10);
    LruCache cache(capacity, catalogue);
    oracles::BruteLru brute(capacity);
    for (int step = 0; step < 10'000; ++step) {
      const ContentId id = static_cast<ContentId>(1 + rng.next_below(catalogue));
      REQUIRE(cache.access(id).hit == brute.access(id));
      REQUIRE(cache.size() <= capacity);
    }
    REQUIRE(cache.recency_order() == brute.order());
  }
}

TEST_CASE("hit and miss accounting adds up") {
  RandomStream rng(26);
  Cache cache(CachePolicy::kLfu, 5, 50);
  std::uint64_t hits = 0;
  for (int i = 0; i < 1000; ++i)
    if (cache.access(static_cast<ContentId>(1 + rng.next_below(50))).hit) ++hits;
  CHECK(cache.accesses() == 1000);
  CHECK(cache.hits() == hits);
}

TEST_CASE("steady-state lfu hit ratio oracle") {
  const ZipfCatalogue cat(2, 1.0);
  CHECK(steady_state_lfu_chr(cat, 2) == 1.0);
  CHECK(steady_state_lfu_chr(cat, 0) == 0.0);
  CHECK(steady_state_lfu_chr(cat, 1) == Catch::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK_THROWS_AS(steady_state_lfu_chr(cat, 3), ConfigError);
}

TEST_CASE("a zipf-fed lfu cache converges to the analytic hit ratio") {
  const std::size_t C = 1000, c = 50;
  const ZipfCatalogue cat(C, 0.8);
  LfuCache cache(c, C);
  RandomStream rng(27);
  const std::size_t total = 1'000'000, tail = 100'000;
  std::uint64_t tail_hits = 0;
  for (std::size_t i = 0; i < total; ++i) {
    const bool hit = cache.access(cat.sample(rng)).hit;
    if (i >= total - tail && hit) ++tail_hits;
  }
  const double simulated = static_cast<double>(tail_hits) / static_cast<double>(tail);
  CHECK(std::abs(simulated - steady_state_lfu_chr(cat, c)) <= 0.02);
}
