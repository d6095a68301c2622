#include "riskmesh/world.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "riskmesh/rng.hpp"

namespace riskmesh {

namespace {

// Rough North-American age pyramid, by decile.
constexpr std::array<double, 10> kAgeWeights = {0.105, 0.107, 0.134, 0.139, 0.127,
                                                0.129, 0.121, 0.081, 0.040, 0.017};

constexpr std::array<double, 7> kHouseholdSizeWeights = {0.0, 0.28, 0.34, 0.16, 0.14, 0.06, 0.02};

int sample_weighted(Rng& rng, const double* w, int n) {
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += w[i];
  double x = rng.uniform() * total;
  for (int i = 0; i < n; ++i) {
    x -= w[i];
    if (x < 0.0) return i;
  }
  return n - 1;
}

int sample_age(Rng& rng) {
  int decile = sample_weighted(rng, kAgeWeights.data(), 10);
  int lo = decile * 10;
  int span = decile == 9 ? 15 : 9;
  return lo + static_cast<int>(rng.uniform_int(0, span));
}

std::uint8_t sample_conditions(Rng& rng, int age) {
  double scale = age < 40 ? 0.4 : age < 65 ? 1.0 : 2.2;
  std::uint8_t c = 0;
  if (rng.chance(0.06 * scale)) c |= kConditionDiabetes;
  if (rng.chance(0.05 * scale)) c |= kConditionHeart;
  if (rng.chance(0.04 * scale)) c |= kConditionLung;
  if (rng.chance(0.02 * scale)) c |= kConditionImmunosuppressed;
  return c;
}

}  // namespace

World build_world(const SimConfig& cfg) {
  cfg.validate();
  World w;
  w.cfg = cfg;

  const int pop = cfg.world.population;
  Rng rng(derive_seed(cfg.world.seed, {0x77 /*world*/}));

  // Demographics.
  w.agents.resize(static_cast<std::size_t>(pop));
  for (int i = 0; i < pop; ++i) {
    Agent& a = w.agents[static_cast<std::size_t>(i)];
    a.id = i;
    a.age = sample_age(rng);
    a.sex = rng.chance(0.5) ? Sex::female : Sex::male;
    a.conditions = sample_conditions(rng, a.age);
    a.carefulness = rng.uniform();
    a.mask_propensity = std::clamp(0.2 + 0.6 * a.carefulness + rng.normal(0.0, 0.1), 0.0, 1.0);
  }

  // Non-household locations first; ids are assigned in kind order so layouts
  // are stable under population changes.
  LocationCounts counts = resolve_location_counts(cfg.world);
  auto add_locations = [&w](LocationKind kind, int n, int capacity) {
    for (int i = 0; i < n; ++i) {
      Location loc;
      loc.id = static_cast<LocationId>(w.locations.size());
      loc.kind = kind;
      loc.capacity = capacity;
      w.locations.push_back(loc);
      w.by_kind[static_cast<std::size_t>(kind)].push_back(loc.id);
    }
  };
  add_locations(LocationKind::store, counts.store, 25);
  add_locations(LocationKind::park, counts.park, 50);
  add_locations(LocationKind::hospital, counts.hospital, std::max(10, pop / 20));
  add_locations(LocationKind::icu, counts.icu, std::max(4, pop / 100));
  add_locations(LocationKind::nursing_home, counts.nursing_home, std::max(10, pop / 50));
  add_locations(LocationKind::workplace, counts.workplace, 40);
  add_locations(LocationKind::transit, counts.transit, 30);

  // Households. Sizes are sampled until everyone is housed; an explicit count
  // in the config instead spreads agents evenly across that many households.
  std::vector<int> household_sizes;
  if (counts.household > 0) {
    household_sizes.assign(static_cast<std::size_t>(counts.household), 0);
    for (int i = 0; i < pop; ++i) household_sizes[static_cast<std::size_t>(i) % household_sizes.size()]++;
    std::erase(household_sizes, 0);
  } else {
    int housed = 0;
    while (housed < pop) {
      int size = sample_weighted(rng, kHouseholdSizeWeights.data(), 7);
      size = std::min(size == 0 ? 1 : size, pop - housed);
      household_sizes.push_back(size);
      housed += size;
    }
  }

  std::vector<LocationId> households;
  households.reserve(household_sizes.size());
  for (int size : household_sizes) {
    Location loc;
    loc.id = static_cast<LocationId>(w.locations.size());
    loc.kind = LocationKind::household;
    loc.capacity = size;
    w.locations.push_back(loc);
    w.by_kind[static_cast<std::size_t>(LocationKind::household)].push_back(loc.id);
    households.push_back(loc.id);
  }

  // Fill households in shuffled agent order so ages mix.
  std::vector<AgentId> order(static_cast<std::size_t>(pop));
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  {
    std::size_t next = 0;
    for (std::size_t h = 0; h < households.size(); ++h) {
      for (int k = 0; k < household_sizes[h]; ++k) {
        w.agents[static_cast<std::size_t>(order[next++])].household = households[h];
      }
    }
  }

  // A share of the very old live in nursing homes instead.
  const auto& nursing = w.kind_index(LocationKind::nursing_home);
  if (!nursing.empty()) {
    std::size_t slot = 0;
    for (auto& a : w.agents) {
      if (a.age >= 80 && rng.chance(cfg.world.nursing_home_rate)) {
        a.household = nursing[slot++ % nursing.size()];
      }
    }
  }

  // Zones: households (and the other fixed sites) are spread round-robin.
  // With a small tail zone, a handful of households land there so the zone
  // stays under the aggregation anonymity floor.
  w.zone_total = cfg.world.zone_count + (cfg.world.small_zone_tail ? 1 : 0);
  const ZoneId tail_zone = cfg.world.small_zone_tail ? w.zone_total - 1 : -1;
  {
    int rr = 0;
    int tail_budget = cfg.world.small_zone_tail ? 10 : 0;
    for (LocationId h : households) {
      Location& loc = w.locations[static_cast<std::size_t>(h)];
      if (tail_budget > 0) {
        loc.zone = tail_zone;
        --tail_budget;
      } else {
        loc.zone = rr++ % cfg.world.zone_count;
      }
    }
    rr = 0;
    for (auto& loc : w.locations) {
      if (loc.kind != LocationKind::household) loc.zone = rr++ % cfg.world.zone_count;
    }
  }
  w.zone_population.assign(static_cast<std::size_t>(w.zone_total), 0);
  for (auto& a : w.agents) {
    a.home_zone = w.locations[static_cast<std::size_t>(a.household)].zone;
    w.zone_population[static_cast<std::size_t>(a.home_zone)]++;
  }

  // Employment. Healthcare workers staff the hospital; everyone else employed
  // gets a fixed workplace.
  const auto& workplaces = w.kind_index(LocationKind::workplace);
  const auto& hospitals = w.kind_index(LocationKind::hospital);
  for (auto& a : w.agents) {
    if (a.age < 18 || a.age > 65) continue;
    if (!hospitals.empty() && rng.chance(cfg.world.healthcare_worker_rate)) {
      a.healthcare_worker = true;
      a.workplace = hospitals[rng.pick_index(hospitals.size())];
    } else if (!workplaces.empty() && rng.chance(cfg.world.employment_rate)) {
      a.workplace = workplaces[rng.pick_index(workplaces.size())];
    }
  }

  // Routine destinations.
  const auto& stores = w.kind_index(LocationKind::store);
  const auto& parks = w.kind_index(LocationKind::park);
  const auto& transit = w.kind_index(LocationKind::transit);
  w.prefs.resize(static_cast<std::size_t>(pop));
  auto pick_some = [&rng](const std::vector<LocationId>& from, std::size_t n,
                          std::vector<LocationId>& out) {
    for (std::size_t i = 0; i < n && !from.empty(); ++i) {
      out.push_back(from[rng.pick_index(from.size())]);
    }
  };
  for (int i = 0; i < pop; ++i) {
    auto& p = w.prefs[static_cast<std::size_t>(i)];
    pick_some(stores, 3, p.stores);
    pick_some(parks, 2, p.parks);
    pick_some(transit, 2, p.transit);
  }

  // Exactly round(adoption * population) phones.
  int phones = static_cast<int>(std::lround(cfg.world.app_adoption * pop));
  std::vector<AgentId> app_order(static_cast<std::size_t>(pop));
  std::iota(app_order.begin(), app_order.end(), 0);
  rng.shuffle(app_order);
  for (int i = 0; i < phones; ++i) {
    w.agents[static_cast<std::size_t>(app_order[static_cast<std::size_t>(i)])].has_app = true;
  }

  // Day-0 exposures.
  std::vector<AgentId> seed_order(static_cast<std::size_t>(pop));
  std::iota(seed_order.begin(), seed_order.end(), 0);
  rng.shuffle(seed_order);
  for (int i = 0; i < cfg.world.initial_infected; ++i) {
    w.seed_infections.push_back(seed_order[static_cast<std::size_t>(i)]);
  }
  std::sort(w.seed_infections.begin(), w.seed_infections.end());

  return w;
}

}  // namespace riskmesh
