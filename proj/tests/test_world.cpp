#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "riskmesh/world.hpp"

using namespace riskmesh;

namespace {

SimConfig small_cfg(int population, double adoption = 0.6) {
  SimConfig cfg;
  cfg.world.population = population;
  cfg.world.app_adoption = adoption;
  cfg.world.initial_infected = population >= 20 ? 5 : 0;
  cfg.world.seed = 42;
  return cfg;
}

}  // namespace

TEST_CASE("app ownership count is exact") {
  World w = build_world(small_cfg(1000, 0.6));
  long with_app = std::count_if(w.agents.begin(), w.agents.end(),
                                [](const Agent& a) { return a.has_app; });
  CHECK(with_app == 600);

  World w2 = build_world(small_cfg(333, 0.5));
  long with_app2 = std::count_if(w2.agents.begin(), w2.agents.end(),
                                 [](const Agent& a) { return a.has_app; });
  CHECK(with_app2 == 167);  // round(0.5 * 333)
}

TEST_CASE("every agent has exactly one residence in a valid zone") {
  World w = build_world(small_cfg(800));
  REQUIRE(w.agents.size() == 800);
  for (const Agent& a : w.agents) {
    REQUIRE(a.household != kNoLocation);
    const Location& home = w.locations[static_cast<std::size_t>(a.household)];
    bool residential =
        home.kind == LocationKind::household || home.kind == LocationKind::nursing_home;
    CHECK(residential);
    CHECK(home.zone == a.home_zone);
    CHECK(a.home_zone >= 0);
    CHECK(a.home_zone < w.zone_total);
    CHECK(a.carefulness >= 0.0);
    CHECK(a.carefulness <= 1.0);
    CHECK(a.age >= 0);
    CHECK(a.age <= 105);  // top decile spans 90-105
  }
  long zone_sum = 0;
  for (int z : w.zone_population) zone_sum += z;
  CHECK(zone_sum == 800);
}

TEST_CASE("locations are capacity-positive and zone-assigned") {
  World w = build_world(small_cfg(500));
  for (const Location& l : w.locations) {
    CHECK(l.capacity >= 1);
    CHECK(l.zone >= 0);
    CHECK(l.zone < w.zone_total);
  }
  for (int k = 0; k < kLocationKinds; ++k) {
    for (LocationId lid : w.by_kind[static_cast<std::size_t>(k)]) {
      CHECK(w.locations[static_cast<std::size_t>(lid)].kind == static_cast<LocationKind>(k));
    }
  }
}

TEST_CASE("seed infections honor the configured count, including zero") {
  World w = build_world(small_cfg(1000));
  CHECK(w.seed_infections.size() == 5);
  std::set<AgentId> uniq(w.seed_infections.begin(), w.seed_infections.end());
  CHECK(uniq.size() == w.seed_infections.size());

  SimConfig none = small_cfg(2);
  none.world.initial_infected = 0;
  CHECK(build_world(none).seed_infections.empty());
}

TEST_CASE("same config and seed build byte-identical rosters") {
  SimConfig cfg = small_cfg(600);
  World a = build_world(cfg);
  World b = build_world(cfg);
  REQUIRE(a.agents.size() == b.agents.size());
  for (std::size_t i = 0; i < a.agents.size(); ++i) {
    const Agent &x = a.agents[i], &y = b.agents[i];
    CHECK(x.age == y.age);
    CHECK(x.sex == y.sex);
    CHECK(x.conditions == y.conditions);
    CHECK(x.carefulness == y.carefulness);
    CHECK(x.healthcare_worker == y.healthcare_worker);
    CHECK(x.has_app == y.has_app);
    CHECK(x.household == y.household);
    CHECK(x.workplace == y.workplace);
  }
  cfg.world.seed = 43;
  World c = build_world(cfg);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.agents.size(); ++i) {
    any_diff = any_diff || a.agents[i].age != c.agents[i].age ||
               a.agents[i].household != c.agents[i].household;
  }
  CHECK(any_diff);
}

TEST_CASE("invalid world configs are rejected by field name") {
  SimConfig cfg = small_cfg(1);
  CHECK_THROWS_WITH_AS(build_world(cfg), doctest::Contains("population"), ConfigError);
  cfg = small_cfg(100);
  cfg.world.initial_infected = 101;
  CHECK_THROWS_AS(build_world(cfg), ConfigError);
  cfg = small_cfg(100);
  cfg.world.zone_count = 0;
  CHECK_THROWS_AS(build_world(cfg), ConfigError);
}

TEST_CASE("small zone tail produces one under-100 zone for lumping drills") {
  SimConfig cfg = small_cfg(1000);
  cfg.world.small_zone_tail = true;
  World w = build_world(cfg);
  CHECK(w.zone_total == cfg.world.zone_count + 1);
  CHECK(w.zone_population.back() > 0);
  CHECK(w.zone_population.back() < 100);
}

TEST_CASE("healthcare workers are employed at medical locations") {
  World w = build_world(small_cfg(2000));
  int hcw = 0;
  for (const Agent& a : w.agents) {
    if (!a.healthcare_worker) continue;
    hcw += 1;
    REQUIRE(a.workplace != kNoLocation);
    LocationKind k = w.locations[static_cast<std::size_t>(a.workplace)].kind;
    bool medical = k == LocationKind::hospital || k == LocationKind::icu ||
                   k == LocationKind::nursing_home;
    CHECK(medical);
  }
  CHECK(hcw > 0);
}
