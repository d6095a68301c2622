#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "riskmesh/rng.hpp"
#include "riskmesh/types.hpp"
#include "riskmesh/world.hpp"

namespace riskmesh {

// One contact between two agents: same location, consecutive 15-minute slots
// merged. a < b always.
struct Encounter {
  AgentId a = kNoAgent;
  AgentId b = kNoAgent;
  int day = 0;
  int start_slot = 0;
  int duration_min = 0;
  DistanceBand band = DistanceBand::far;
  LocationId location = kNoLocation;
};

// Where every agent is during every slot of one day, plus per-location
// occupancy counts so capacity limits can be enforced while planning.
class OccupancyGrid {
 public:
  OccupancyGrid(int n_agents, int n_locations);

  void reset();
  void place(AgentId agent, int slot, LocationId loc);
  void place_range(AgentId agent, int first_slot, int last_slot, LocationId loc);
  LocationId at(AgentId agent, int slot) const {
    return cells_[static_cast<std::size_t>(agent) * kSlotsPerDay + static_cast<std::size_t>(slot)];
  }
  int occupancy(LocationId loc, int slot) const {
    return counts_[static_cast<std::size_t>(loc) * kSlotsPerDay + static_cast<std::size_t>(slot)];
  }
  int n_agents() const { return n_agents_; }
  int n_locations() const { return n_locations_; }

 private:
  int n_agents_;
  int n_locations_;
  std::vector<LocationId> cells_;
  std::vector<std::uint16_t> counts_;
};

// Distance band distribution depends on the venue; agents advised to keep
// distance (recommendation level 2 and up) push a sampled band one step out.
DistanceBand sample_distance_band(LocationKind kind, Rng& rng);
DistanceBand widen_band(DistanceBand b);

// Band for one specific encounter. A pure function of the encounter tuple and
// the day's band seed, so any scanner that finds the same (a, b, location,
// start_slot) arrives at the same band regardless of scan order.
DistanceBand encounter_band(LocationKind kind, bool either_distanced, std::uint64_t band_seed,
                            AgentId a, AgentId b, LocationId loc, int start_slot);

// Scans the grid slot by slot and emits merged encounters in creation order.
// `distancing` marks agents currently advised to keep physical distance (may
// be empty). Sleeping slots never produce encounters.
std::vector<Encounter> detect_encounters(const OccupancyGrid& grid, const World& world, int day,
                                         std::span<const std::uint8_t> distancing,
                                         std::uint64_t band_seed);

}  // namespace riskmesh
