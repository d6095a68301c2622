#pragma once

#include <vector>

#include "riskmesh/encounter.hpp"
#include "riskmesh/rng.hpp"
#include "riskmesh/world.hpp"

namespace riskmesh {

enum class PinnedState : std::uint8_t { free_moving, hospital_bed, icu_bed, absent };

// Everything outside the world that shapes a day's movement.
struct MobilityContext {
  int day = 0;
  // Uniform contact dial: 0 = routine behavior, 1 = full suppression;
  // negative values boost voluntary outings (equalizer headroom).
  double global_scalar = 0.0;
  // Per-agent recommendation level 1..4; empty = everyone at level 1.
  std::span<const std::uint8_t> rec_level;
  std::span<const PinnedState> pinned;
  std::span<const LocationId> pinned_loc;
  // Per-agent sets of already-visited places (sorted); levels 3+ restrict
  // destination choice to these. Grown in place as agents explore.
  std::vector<std::vector<LocationId>>* visited = nullptr;
  double level3_duration_factor = 0.5;
  double level4_outing_factor = 0.1;
};

struct DayMobilityStats {
  std::vector<std::uint8_t> outings;      // discretionary outings per agent
  std::vector<std::uint16_t> away_minutes;  // minutes spent outside home
};

bool is_weekend(int day);

// Plans one day for every agent: nights and sleep at home, work blocks on
// weekdays, Poisson-distributed discretionary outings with optional transit
// legs. Fills `grid` (previously reset) and, if given, `stats`.
void build_itineraries(const World& world, const MobilityContext& ctx, OccupancyGrid& grid,
                       Rng& rng, DayMobilityStats* stats);

}  // namespace riskmesh
