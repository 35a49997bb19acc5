#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "iccon/catalogue.hpp"

using namespace iccon;

TEST_CASE("zipf weights for tiny catalogues") {
  const ZipfCatalogue two(2, 1.0);
  CHECK(two.probability(1) == Catch::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(two.probability(2) == Catch::Approx(1.0 / 3.0).epsilon(1e-14));

  const ZipfCatalogue uniform(5, 0.0);
  for (ContentId i = 1; i <= 5; ++i)
    CHECK(uniform.probability(i) == Catch::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("top rank weight matches direct summation at fig-3 scale") {
  const std::size_t C = 10000;
  const double s = 0.8;
  const ZipfCatalogue cat(C, s);
  long double norm = 0.0L;
  for (std::size_t i = 1; i <= C; ++i) norm += powl(static_cast<long double>(i), -0.8L);
  CHECK(cat.probability(1) ==
        Catch::Approx(static_cast<double>(1.0L / norm)).epsilon(1e-12));
}

TEST_CASE("catalogue invariants: normalization and monotonicity") {
  for (std::size_t C : {2ul, 5ul, 137ul, 10000ul}) {
    for (double s : {0.0, 0.5, 0.8, 1.2}) {
      const ZipfCatalogue cat(C, s);
      long double sum = 0.0L;
      for (ContentId i = 1; i <= C; ++i) sum += cat.probability(i);
      CHECK(std::abs(static_cast<double>(sum) - 1.0) <= 1e-12);
      for (ContentId i = 1; i < C; ++i)
        CHECK(cat.probability(i) >= cat.probability(i + 1));
      CHECK(cat.top_mass(C) == 1.0);
    }
  }
}

TEST_CASE("catalogue rejects degenerate parameters") {
  CHECK_THROWS_AS(ZipfCatalogue(0, 0.8), ConfigError);
  CHECK_THROWS_AS(ZipfCatalogue(10, -0.1), ConfigError);
}

TEST_CASE("sampling a single-item catalogue") {
  const ZipfCatalogue cat(1, 0.7);
  RandomStream rng(42);
  for (int i = 0; i < 100; ++i) CHECK(cat.sample(rng) == 1);
}

namespace {

std::vector<double> sample_frequencies(const ZipfCatalogue& cat, std::size_t draws,
                                       std::uint64_t seed) {
  RandomStream rng(seed);
  std::vector<std::uint64_t> counts(cat.size() + 1, 0);
  for (std::size_t i = 0; i < draws; ++i) ++counts[cat.sample(rng)];
  std::vector<double> freq(cat.size() + 1, 0.0);
  for (std::size_t i = 1; i <= cat.size(); ++i)
    freq[i] = static_cast<double>(counts[i]) / static_cast<double>(draws);
  return freq;
}

double sigma(double p, double n) { return std::sqrt(p * (1.0 - p) / n); }

}  // namespace

TEST_CASE("uniform sampling frequencies stay within 3 sigma") {
  const ZipfCatalogue cat(5, 0.0);
  const std::size_t n = 1'000'000;
  const auto freq = sample_frequencies(cat, n, 7);
  for (ContentId i = 1; i <= 5; ++i)
    CHECK(std::abs(freq[i] - 0.2) <= 3.0 * sigma(0.2, static_cast<double>(n)));
}

TEST_CASE("two-item zipf sampling hits 2/3 within 3 sigma") {
  const ZipfCatalogue cat(2, 1.0);
  const std::size_t n = 1'000'000;
  const auto freq = sample_frequencies(cat, n, 11);
  CHECK(std::abs(freq[1] - 2.0 / 3.0) <= 3.0 * sigma(2.0 / 3.0, static_cast<double>(n)));
}

TEST_CASE("sampling frequencies satisfy the 4-sigma envelope per rank") {
  const ZipfCatalogue cat(50, 0.8);
  const std::size_t n = 1'000'000;
  const auto freq = sample_frequencies(cat, n, 13);
  for (ContentId i = 1; i <= 50; ++i) {
    const double p = cat.probability(i);
    CHECK(std::abs(freq[i] - p) <= 4.0 * sigma(p, static_cast<double>(n)));
  }
}

TEST_CASE("profile generation: forced full catalogue") {
  const ZipfCatalogue cat(10, 0.8);
  RandomStream rng(3);
  const auto profiles = generate_profiles(cat, 1, 10, rng);
  REQUIRE(profiles.size() == 1);
  REQUIRE(profiles[0].size() == 10);
  for (ContentId i = 1; i <= 10; ++i) CHECK(profiles[0].contains(i));
}

TEST_CASE("profile generation: distinct singletons") {
  const ZipfCatalogue cat(100, 0.8);
  RandomStream rng(4);
  const auto profiles = generate_profiles(cat, 2, 1, rng);
  REQUIRE(profiles.size() == 2);
  CHECK(profiles[0].items() != profiles[1].items());
}

TEST_CASE("profile generation at fig-3 scale") {
  const ZipfCatalogue cat(10000, 0.8);
  RandomStream rng(5);
  const auto profiles = generate_profiles(cat, 50, 1000, rng);
  REQUIRE(profiles.size() == 50);
  std::set<std::vector<ContentId>> distinct;
  for (const UeProfile& p : profiles) {
    REQUIRE(p.size() == 1000);
    CHECK(p.items().front() >= 1);
    CHECK(p.items().back() <= 10000);
    distinct.insert(p.items());
  }
  CHECK(distinct.size() == 50);
}

TEST_CASE("profile generation rejects impossible requests") {
  const ZipfCatalogue cat(10, 0.8);
  RandomStream rng(6);
  CHECK_THROWS_AS(generate_profiles(cat, 1, 11, rng), ConfigError);
  CHECK_THROWS_AS(generate_profiles(cat, 1, 0, rng), ConfigError);
  // u = C forces every profile to be the whole catalogue, so two distinct
  // profiles cannot exist; the retry cap must turn this into an error.
  CHECK_THROWS_AS(generate_profiles(cat, 2, 10, rng), ConfigError);
}

TEST_CASE("profile weights follow global popularity order and sum to one") {
  const ZipfCatalogue cat(1000, 0.8);
  RandomStream rng(8);
  const auto profiles = generate_profiles(cat, 5, 100, rng);
  for (const UeProfile& p : profiles) {
    long double sum = 0.0L;
    for (std::size_t i = 0; i < p.size(); ++i) {
      sum += p.weight(i);
      if (i + 1 < p.size()) CHECK(p.weight(i) >= p.weight(i + 1));
    }
    CHECK(std::abs(static_cast<double>(sum) - 1.0) <= 1e-12);
  }
}

TEST_CASE("profile assignment frequencies") {
  SECTION("single profile is always picked") {
    const ZipfCatalogue selector(1, 0.8);
    RandomStream rng(9);
    for (int i = 0; i < 50; ++i) CHECK(pick_profile(selector, rng) == 0);
  }
  SECTION("two profiles at slope 1") {
    const ZipfCatalogue selector(2, 1.0);
    RandomStream rng(10);
    const std::size_t n = 1'000'000;
    std::size_t first = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (pick_profile(selector, rng) == 0) ++first;
    const double freq = static_cast<double>(first) / static_cast<double>(n);
    CHECK(std::abs(freq - 2.0 / 3.0) <= 3.0 * sigma(2.0 / 3.0, static_cast<double>(n)));
  }
  SECTION("fig-3 profile count: all deviations below 0.005") {
    const ZipfCatalogue selector(50, 0.8);
    RandomStream rng(12);
    const std::size_t n = 1'000'000;
    std::vector<std::size_t> counts(50, 0);
    for (std::size_t i = 0; i < n; ++i) ++counts[pick_profile(selector, rng)];
    double max_dev = 0.0;
    for (std::size_t j = 0; j < 50; ++j) {
      const double freq = static_cast<double>(counts[j]) / static_cast<double>(n);
      max_dev = std::max(max_dev,
                         std::abs(freq - selector.probability(static_cast<ContentId>(j + 1))));
    }
    CHECK(max_dev < 0.005);
  }
}

TEST_CASE("request sampling stays inside the profile") {
  const ZipfCatalogue cat(10, 0.8);

  SECTION("singleton profile") {
    const UeProfile p({ContentId{4}}, cat);
    RandomStream rng(14);
    for (int i = 0; i < 100; ++i) CHECK(p.sample(rng) == 4);
  }

  SECTION("pair under C=2 zipf slope 1") {
    const ZipfCatalogue two(2, 1.0);
    const UeProfile p({ContentId{1}, ContentId{2}}, two);
    RandomStream rng(15);
    const std::size_t n = 1'000'000;
    std::size_t ones = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (p.sample(rng) == 1) ++ones;
    const double freq = static_cast<double>(ones) / static_cast<double>(n);
    CHECK(std::abs(freq - 2.0 / 3.0) <= 3.0 * sigma(2.0 / 3.0, static_cast<double>(n)));
  }

  SECTION("renormalized weights for {3,7,9}") {
    const UeProfile p({ContentId{3}, ContentId{7}, ContentId{9}}, cat);
    const double total = std::pow(3.0, -0.8) + std::pow(7.0, -0.8) + std::pow(9.0, -0.8);
    const double expected[] = {std::pow(3.0, -0.8) / total, std::pow(7.0, -0.8) / total,
                               std::pow(9.0, -0.8) / total};
    RandomStream rng(16);
    const std::size_t n = 1'000'000;
    std::map<ContentId, std::size_t> counts;
    for (std::size_t i = 0; i < n; ++i) ++counts[p.sample(rng)];
    REQUIRE(counts.size() == 3);
    const ContentId ids[] = {3, 7, 9};
    for (int k = 0; k < 3; ++k) {
      const double freq =
          static_cast<double>(counts[ids[k]]) / static_cast<double>(n);
      CHECK(std::abs(freq - expected[k]) <=
            3.0 * sigma(expected[k], static_cast<double>(n)));
    }
  }

  SECTION("support equals the item set exactly") {
    const UeProfile p({ContentId{2}, ContentId{5}, ContentId{6}, ContentId{10}}, cat);
    RandomStream rng(17);
    std::set<ContentId> seen;
    for (int i = 0; i < 100'000; ++i) seen.insert(p.sample(rng));
    CHECK(seen == std::set<ContentId>(p.items().begin(), p.items().end()));
  }
}

TEST_CASE("sampling is a pure function of the seed") {
  const ZipfCatalogue cat(1000, 0.8);
  RandomStream a(123), b(123);
  for (int i = 0; i < 10'000; ++i) REQUIRE(cat.sample(a) == cat.sample(b));

  RandomStream pa(77), pb(77);
  const auto profiles_a = generate_profiles(cat, 5, 50, pa);
  const auto profiles_b = generate_profiles(cat, 5, 50, pb);
  for (std::size_t i = 0; i < profiles_a.size(); ++i)
    CHECK(profiles_a[i].items() == profiles_b[i].items());
}

TEST_CASE("empty profiles are rejected") {
  const ZipfCatalogue cat(10, 0.8);
  CHECK_THROWS_AS(UeProfile({}, cat), ConfigError);
}
