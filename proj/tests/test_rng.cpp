#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "riskmesh/rng.hpp"

using namespace riskmesh;

TEST_CASE("derive_seed separates paths and is order sensitive") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t m : {0ull, 1ull, 42ull}) {
    seen.insert(derive_seed(m, {}));
    seen.insert(derive_seed(m, {0}));
    seen.insert(derive_seed(m, {1}));
    seen.insert(derive_seed(m, {0, 1}));
    seen.insert(derive_seed(m, {1, 0}));
  }
  CHECK(seen.size() == 15);
  CHECK(derive_seed(7, {1, 2, 3}) == derive_seed(7, {1, 2, 3}));
}

TEST_CASE("uniform stays in [0,1) and fills the unit interval") {
  Rng rng(123);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 100000; ++i) {
    double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo < 1e-3);
  CHECK(hi > 1.0 - 1e-3);
}

TEST_CASE("uniform_int covers the inclusive range uniformly") {
  Rng rng(99);
  std::vector<long> counts(6, 0);
  const int n = 120000;
  for (int i = 0; i < n; ++i) {
    std::int64_t v = rng.uniform_int(2, 7);
    REQUIRE(v >= 2);
    REQUIRE(v <= 7);
    counts[static_cast<std::size_t>(v - 2)] += 1;
  }
  for (long c : counts) CHECK(std::abs(c - n / 6) < 600);  // ~4.2 sigma
}

TEST_CASE("chance respects the clamp edges") {
  Rng rng(5);
  CHECK_FALSE(rng.chance(0.0));
  CHECK_FALSE(rng.chance(-1.0));
  CHECK(rng.chance(1.0));
  CHECK(rng.chance(2.0));
  int hits = 0;
  for (int i = 0; i < 100000; ++i) hits += rng.chance(0.3);
  CHECK(std::abs(hits - 30000) < 600);
}

TEST_CASE("normal matches its first two moments") {
  Rng rng(7);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double x = rng.normal(3.0, 2.0);
    sum += x;
    sq += x * x;
  }
  double mean = sum / n;
  double var = sq / n - mean * mean;
  CHECK(mean == doctest::Approx(3.0).epsilon(0.01));
  CHECK(var == doctest::Approx(4.0).epsilon(0.03));
}

TEST_CASE("truncated_normal never returns below the floor") {
  Rng rng(11);
  for (int i = 0; i < 20000; ++i) {
    CHECK(rng.truncated_normal(1.0, 3.0, 0.5) >= 0.5);
  }
}

TEST_CASE("poisson mean and variance agree") {
  Rng rng(13);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    int k = rng.poisson(2.5);
    REQUIRE(k >= 0);
    sum += k;
    sq += static_cast<double>(k) * k;
  }
  double mean = sum / n;
  double var = sq / n - mean * mean;
  CHECK(mean == doctest::Approx(2.5).epsilon(0.01));
  CHECK(var == doctest::Approx(2.5).epsilon(0.03));
}

TEST_CASE("identical seeds give identical streams, distinct seeds diverge") {
  Rng a(1000), b(1000), c(1001);
  bool same = true, diff = false;
  for (int i = 0; i < 64; ++i) {
    std::uint64_t x = a.next(), y = b.next(), z = c.next();
    same = same && x == y;
    diff = diff || x != z;
  }
  CHECK(same);
  CHECK(diff);
}

TEST_CASE("shuffle is a permutation and seed-stable") {
  std::vector<int> v1{1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<int> v2 = v1;
  Rng a(21), b(21);
  a.shuffle(v1);
  b.shuffle(v2);
  CHECK(v1 == v2);
  std::multiset<int> elems(v1.begin(), v1.end());
  CHECK(elems == std::multiset<int>{1, 2, 3, 4, 5, 6, 7, 8});
}
