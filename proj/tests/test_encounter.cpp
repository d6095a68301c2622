#include <doctest.h>

#include <algorithm>
#include <map>
#include <tuple>
#include <vector>

#include "riskmesh/encounter.hpp"
#include "riskmesh/itinerary.hpp"
#include "riskmesh/world.hpp"

using namespace riskmesh;

namespace {

SimConfig tiny_cfg(int population) {
  SimConfig cfg;
  cfg.world.population = population;
  cfg.world.initial_infected = 0;
  cfg.world.seed = 17;
  return cfg;
}

// Reference detector: double loop over every (pair, slot) cell, then merge
// consecutive co-located slots per (pair, location) run. Written to be
// obviously correct, not fast; the production scanner must match it exactly.
struct OracleEncounter {
  AgentId a, b;
  int start_slot;
  int duration_min;
  LocationId loc;
};

std::vector<OracleEncounter> brute_force(const OccupancyGrid& grid) {
  std::vector<OracleEncounter> out;
  for (AgentId a = 0; a < grid.n_agents(); ++a) {
    for (AgentId b = a + 1; b < grid.n_agents(); ++b) {
      int run_start = -1;
      LocationId run_loc = kNoLocation;
      for (int slot = kFirstWakingSlot; slot <= kSlotsPerDay; ++slot) {
        LocationId la = slot < kSlotsPerDay ? grid.at(a, slot) : kNoLocation;
        LocationId lb = slot < kSlotsPerDay ? grid.at(b, slot) : kNoLocation;
        LocationId shared = (la == lb && la != kNoLocation) ? la : kNoLocation;
        if (shared == run_loc && run_loc != kNoLocation) continue;
        if (run_loc != kNoLocation) {
          out.push_back({a, b, run_start, (slot - run_start) * kSlotMinutes, run_loc});
        }
        run_loc = shared;
        run_start = slot;
      }
    }
  }
  return out;
}

using PairKey = std::tuple<AgentId, AgentId, int, int, LocationId>;

template <typename E>
std::map<PairKey, int> key_multiset(const std::vector<E>& v) {
  std::map<PairKey, int> m;
  for (const auto& e : v) {
    if constexpr (std::is_same_v<E, Encounter>) {
      m[{e.a, e.b, e.start_slot, e.duration_min, e.location}] += 1;
    } else {
      m[{e.a, e.b, e.start_slot, e.duration_min, e.loc}] += 1;
    }
  }
  return m;
}

}  // namespace

TEST_CASE("three co-present agents yield exactly the three pairs") {
  World world = build_world(tiny_cfg(10));
  OccupancyGrid grid(10, static_cast<int>(world.locations.size()));
  LocationId store = world.kind_index(LocationKind::store).front();
  grid.place(0, 40, store);
  grid.place(1, 40, store);
  grid.place(2, 40, store);
  auto enc = detect_encounters(grid, world, 0, {}, 777);
  REQUIRE(enc.size() == 3);
  std::vector<std::pair<AgentId, AgentId>> pairs;
  for (const Encounter& e : enc) {
    CHECK(e.duration_min == 15);
    CHECK(e.location == store);
    CHECK(e.a < e.b);
    pairs.emplace_back(e.a, e.b);
  }
  std::sort(pairs.begin(), pairs.end());
  CHECK(pairs == std::vector<std::pair<AgentId, AgentId>>{{0, 1}, {0, 2}, {1, 2}});
}

TEST_CASE("consecutive co-located slots merge into one encounter") {
  World world = build_world(tiny_cfg(4));
  OccupancyGrid grid(4, static_cast<int>(world.locations.size()));
  LocationId park = world.kind_index(LocationKind::park).front();
  for (int slot : {40, 41, 42}) {
    grid.place(0, slot, park);
    grid.place(1, slot, park);
  }
  auto enc = detect_encounters(grid, world, 3, {}, 99);
  REQUIRE(enc.size() == 1);
  CHECK(enc[0].start_slot == 40);
  CHECK(enc[0].duration_min == 45);
  // A gap splits the run.
  grid.place(0, 44, park);
  grid.place(1, 44, park);
  CHECK(detect_encounters(grid, world, 3, {}, 99).size() == 2);
}

TEST_CASE("a lone occupant meets nobody") {
  World world = build_world(tiny_cfg(5));
  OccupancyGrid grid(5, static_cast<int>(world.locations.size()));
  LocationId store = world.kind_index(LocationKind::store).front();
  grid.place_range(0, kFirstWakingSlot, kSlotsPerDay - 1, store);
  CHECK(detect_encounters(grid, world, 0, {}, 1).empty());
}

TEST_CASE("sleeping slots produce no encounters") {
  World world = build_world(tiny_cfg(4));
  OccupancyGrid grid(4, static_cast<int>(world.locations.size()));
  LocationId home = world.agents[0].household;
  for (int slot = 0; slot < kFirstWakingSlot; ++slot) {
    grid.place(0, slot, home);
    grid.place(1, slot, home);
  }
  CHECK(detect_encounters(grid, world, 0, {}, 5).empty());
}

TEST_CASE("two agents sharing a household all day accumulate every waking slot") {
  World world = build_world(tiny_cfg(4));
  OccupancyGrid grid(4, static_cast<int>(world.locations.size()));
  LocationId home = world.agents[0].household;
  for (int slot = 0; slot < kSlotsPerDay; ++slot) {
    grid.place(0, slot, home);
    grid.place(1, slot, home);
  }
  auto enc = detect_encounters(grid, world, 0, {}, 5);
  REQUIRE(enc.size() == 1);
  // Slot-by-slot count of shared waking time, kept independent of the scanner.
  int co_located_waking = 0;
  for (int slot = kFirstWakingSlot; slot < kSlotsPerDay; ++slot) {
    if (grid.at(0, slot) == grid.at(1, slot)) co_located_waking += 1;
  }
  CHECK(enc[0].duration_min == co_located_waking * kSlotMinutes);
  CHECK(enc[0].duration_min == (kSlotsPerDay - kFirstWakingSlot) * kSlotMinutes);
}

TEST_CASE("full 50-agent days match the brute-force oracle") {
  SimConfig cfg = tiny_cfg(50);
  World world = build_world(cfg);
  int n = static_cast<int>(world.agents.size());
  OccupancyGrid grid(n, static_cast<int>(world.locations.size()));
  std::vector<std::vector<LocationId>> visited(static_cast<std::size_t>(n));
  Rng rng(31);
  for (int day = 0; day < 20; ++day) {
    MobilityContext ctx;
    ctx.day = day;
    ctx.visited = &visited;
    grid.reset();
    build_itineraries(world, ctx, grid, rng, nullptr);
    std::uint64_t band_seed = derive_seed(cfg.world.seed, {0x11, static_cast<std::uint64_t>(day)});
    auto fast = detect_encounters(grid, world, day, {}, band_seed);
    auto slow = brute_force(grid);
    REQUIRE(key_multiset(fast) == key_multiset(slow));
    for (const Encounter& e : fast) {
      CHECK(e.day == day);
      CHECK(e.a < e.b);
      // The band must be a pure function of the tuple, independent of scan
      // order: recomputing it standalone gives the same answer.
      LocationKind kind = world.locations[static_cast<std::size_t>(e.location)].kind;
      CHECK(encounter_band(kind, false, band_seed, e.a, e.b, e.location, e.start_slot) == e.band);
    }
  }
}

TEST_CASE("band sampling tracks the venue profile") {
  World world = build_world(tiny_cfg(10));
  Rng rng(123);
  auto close_rate = [&](LocationKind kind) {
    int hits = 0;
    for (int i = 0; i < 20000; ++i) {
      hits += sample_distance_band(kind, rng) == DistanceBand::close;
    }
    return hits / 20000.0;
  };
  CHECK(close_rate(LocationKind::household) == doctest::Approx(0.55).epsilon(0.05));
  CHECK(close_rate(LocationKind::park) == doctest::Approx(0.05).epsilon(0.35));
  CHECK(widen_band(DistanceBand::close) == DistanceBand::medium);
  CHECK(widen_band(DistanceBand::medium) == DistanceBand::far);
  CHECK(widen_band(DistanceBand::far) == DistanceBand::far);
}

TEST_CASE("distancing advice pushes bands outward everywhere but home") {
  World world = build_world(tiny_cfg(30));
  int n = static_cast<int>(world.agents.size());
  OccupancyGrid grid(n, static_cast<int>(world.locations.size()));
  LocationId store = world.kind_index(LocationKind::store).front();
  for (AgentId a = 0; a < 20; ++a) grid.place(a, 50, store);
  std::vector<std::uint8_t> nobody(static_cast<std::size_t>(n), 0);
  std::vector<std::uint8_t> everybody(static_cast<std::size_t>(n), 1);
  long close_plain = 0, close_distanced = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    for (const Encounter& e : detect_encounters(grid, world, 0, nobody, seed)) {
      close_plain += e.band == DistanceBand::close;
      total += 1;
    }
    for (const Encounter& e : detect_encounters(grid, world, 0, everybody, seed)) {
      close_distanced += e.band == DistanceBand::close;
    }
  }
  REQUIRE(total > 10000);
  CHECK(close_distanced < close_plain / 2);
}
