#include "riskmesh/encounter.hpp"

#include <unordered_map>

namespace riskmesh {

OccupancyGrid::OccupancyGrid(int n_agents, int n_locations)
    : n_agents_(n_agents), n_locations_(n_locations) {
  cells_.assign(static_cast<std::size_t>(n_agents) * kSlotsPerDay, kNoLocation);
  counts_.assign(static_cast<std::size_t>(n_locations) * kSlotsPerDay, 0);
}

void OccupancyGrid::reset() {
  std::fill(cells_.begin(), cells_.end(), kNoLocation);
  std::fill(counts_.begin(), counts_.end(), 0);
}

void OccupancyGrid::place(AgentId agent, int slot, LocationId loc) {
  auto& cell = cells_[static_cast<std::size_t>(agent) * kSlotsPerDay + static_cast<std::size_t>(slot)];
  if (cell == loc) return;
  if (cell != kNoLocation) {
    counts_[static_cast<std::size_t>(cell) * kSlotsPerDay + static_cast<std::size_t>(slot)]--;
  }
  cell = loc;
  if (loc != kNoLocation) {
    counts_[static_cast<std::size_t>(loc) * kSlotsPerDay + static_cast<std::size_t>(slot)]++;
  }
}

void OccupancyGrid::place_range(AgentId agent, int first_slot, int last_slot, LocationId loc) {
  for (int s = first_slot; s <= last_slot; ++s) place(agent, s, loc);
}

namespace {

struct BandWeights {
  double close;
  double medium;  // remainder is far
};

BandWeights band_weights(LocationKind kind) {
  switch (kind) {
    case LocationKind::household: return {0.55, 0.35};
    case LocationKind::store: return {0.10, 0.35};
    case LocationKind::park: return {0.05, 0.25};
    case LocationKind::hospital: return {0.30, 0.40};
    case LocationKind::icu: return {0.35, 0.40};
    case LocationKind::nursing_home: return {0.40, 0.40};
    case LocationKind::workplace: return {0.15, 0.45};
    case LocationKind::transit: return {0.25, 0.45};
  }
  return {0.1, 0.4};
}

}  // namespace

DistanceBand sample_distance_band(LocationKind kind, Rng& rng) {
  BandWeights w = band_weights(kind);
  double x = rng.uniform();
  if (x < w.close) return DistanceBand::close;
  if (x < w.close + w.medium) return DistanceBand::medium;
  return DistanceBand::far;
}

DistanceBand widen_band(DistanceBand b) {
  switch (b) {
    case DistanceBand::close: return DistanceBand::medium;
    case DistanceBand::medium: return DistanceBand::far;
    case DistanceBand::far: return DistanceBand::far;
  }
  return DistanceBand::far;
}

DistanceBand encounter_band(LocationKind kind, bool either_distanced, std::uint64_t band_seed,
                            AgentId a, AgentId b, LocationId loc, int start_slot) {
  Rng sub(derive_seed(band_seed, {static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b),
                                  static_cast<std::uint64_t>(loc),
                                  static_cast<std::uint64_t>(start_slot)}));
  DistanceBand band = sample_distance_band(kind, sub);
  if (kind != LocationKind::household && either_distanced && sub.chance(0.8)) {
    band = widen_band(band);
  }
  return band;
}

std::vector<Encounter> detect_encounters(const OccupancyGrid& grid, const World& world, int day,
                                         std::span<const std::uint8_t> distancing,
                                         std::uint64_t band_seed) {
  std::vector<Encounter> out;
  const int n = grid.n_agents();

  // Per-slot location cells, rebuilt lazily: cell_stamp tracks which slot a
  // cell's member list belongs to so we can skip clearing all of them.
  std::vector<std::vector<AgentId>> members(static_cast<std::size_t>(grid.n_locations()));
  std::vector<int> cell_stamp(static_cast<std::size_t>(grid.n_locations()), -1);
  std::vector<LocationId> dirty;

  // Pair key -> index into `out` for encounters alive in the previous slot.
  std::unordered_map<std::uint64_t, std::uint32_t> prev, cur;
  prev.reserve(4096);
  cur.reserve(4096);

  auto pair_key = [n](AgentId a, AgentId b) {
    return static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(n) +
           static_cast<std::uint64_t>(b);
  };
  auto distanced = [&distancing](AgentId a) {
    return !distancing.empty() && distancing[static_cast<std::size_t>(a)] != 0;
  };

  for (int slot = kFirstWakingSlot; slot < kSlotsPerDay; ++slot) {
    dirty.clear();
    for (AgentId a = 0; a < n; ++a) {
      LocationId loc = grid.at(a, slot);
      if (loc == kNoLocation) continue;
      auto li = static_cast<std::size_t>(loc);
      if (cell_stamp[li] != slot) {
        cell_stamp[li] = slot;
        members[li].clear();
        dirty.push_back(loc);
      }
      members[li].push_back(a);
    }

    cur.clear();
    for (LocationId loc : dirty) {
      const auto& cell = members[static_cast<std::size_t>(loc)];
      if (cell.size() < 2) continue;
      const LocationKind kind = world.locations[static_cast<std::size_t>(loc)].kind;
      for (std::size_t i = 0; i + 1 < cell.size(); ++i) {
        for (std::size_t j = i + 1; j < cell.size(); ++j) {
          AgentId a = cell[i], b = cell[j];
          std::uint64_t key = pair_key(a, b);
          if (auto it = prev.find(key); it != prev.end() && out[it->second].location == loc) {
            out[it->second].duration_min += kSlotMinutes;
            cur.emplace(key, it->second);
            continue;
          }
          Encounter e;
          e.a = a;
          e.b = b;
          e.day = day;
          e.start_slot = slot;
          e.duration_min = kSlotMinutes;
          e.location = loc;
          e.band = encounter_band(kind, distanced(a) || distanced(b), band_seed, a, b, loc, slot);
          cur.emplace(key, static_cast<std::uint32_t>(out.size()));
          out.push_back(e);
        }
      }
    }
    std::swap(prev, cur);
  }
  return out;
}

}  // namespace riskmesh
