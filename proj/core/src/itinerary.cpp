#include "riskmesh/itinerary.hpp"

#include <algorithm>
#include <cmath>

namespace riskmesh {

namespace {

constexpr int kWorkStart = 36;  // 09:00
constexpr int kWorkEnd = 67;    // 17:00 exclusive of 68

bool in_sorted(const std::vector<LocationId>& v, LocationId x) {
  return std::binary_search(v.begin(), v.end(), x);
}

void insert_sorted(std::vector<LocationId>& v, LocationId x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end() || *it != x) v.insert(it, x);
}

}  // namespace

bool is_weekend(int day) {
  int d = day % 7;
  return d == 5 || d == 6;
}

void build_itineraries(const World& world, const MobilityContext& ctx, OccupancyGrid& grid,
                       Rng& rng, DayMobilityStats* stats) {
  const auto& cfg = world.cfg.world;
  const int n = static_cast<int>(world.agents.size());
  const bool weekend = cfg.weekends && is_weekend(ctx.day);
  // Above 0 the dial suppresses movement up to full lockdown at 1; below 0 it
  // boosts discretionary outings instead, which the mobility equalizer uses
  // when a policy's own restrictions overshoot the contact target.
  const double scalar = std::clamp(ctx.global_scalar, -3.0, 1.0);

  if (stats) {
    stats->outings.assign(static_cast<std::size_t>(n), 0);
    stats->away_minutes.assign(static_cast<std::size_t>(n), 0);
  }

  for (AgentId id = 0; id < n; ++id) {
    const Agent& agent = world.agents[static_cast<std::size_t>(id)];
    const auto idx = static_cast<std::size_t>(id);

    const PinnedState pin = ctx.pinned.empty() ? PinnedState::free_moving : ctx.pinned[idx];
    if (pin == PinnedState::absent) continue;
    if (pin == PinnedState::hospital_bed || pin == PinnedState::icu_bed) {
      grid.place_range(id, kFirstWakingSlot, kSlotsPerDay - 1, ctx.pinned_loc[idx]);
      if (stats) stats->away_minutes[idx] = static_cast<std::uint16_t>(
          (kSlotsPerDay - kFirstWakingSlot) * kSlotMinutes);
      continue;
    }

    const int rec = ctx.rec_level.empty() ? 1 : ctx.rec_level[idx];
    grid.place_range(id, kFirstWakingSlot, kSlotsPerDay - 1, agent.household);

    // Work block. Level 4 means stay home unless the job cannot be done
    // remotely (healthcare); level 3 halves the time on site.
    bool works_today = agent.workplace != kNoLocation;
    if (weekend) works_today = agent.healthcare_worker && rng.chance(0.5);
    if (works_today && rec >= 4 && !agent.healthcare_worker) works_today = false;
    if (works_today && !agent.healthcare_worker && rng.chance(0.8 * scalar)) works_today = false;
    if (works_today) {
      int end = kWorkEnd;
      if (rec == 3) {
        int slots = std::max(
            1, static_cast<int>(std::lround((kWorkEnd - kWorkStart + 1) * ctx.level3_duration_factor)));
        end = kWorkStart + slots - 1;
      }
      grid.place_range(id, kWorkStart, end, agent.workplace);
      if (stats) {
        stats->away_minutes[idx] =
            static_cast<std::uint16_t>(stats->away_minutes[idx] + (end - kWorkStart + 1) * kSlotMinutes);
      }
    }

    // Discretionary outings.
    double rate = cfg.discretionary_rate;
    if (weekend) rate *= cfg.weekend_rate_boost;
    rate *= 1.3 - 0.6 * agent.carefulness;
    rate *= 1.0 - scalar;
    if (rec >= 4) rate *= ctx.level4_outing_factor;
    int n_outings = rng.poisson(rate);

    const auto& prefs = world.prefs[idx];
    std::vector<LocationId>* visited =
        ctx.visited ? &(*ctx.visited)[idx] : nullptr;

    for (int o = 0; o < n_outings; ++o) {
      const bool to_store = rng.chance(0.65);
      const auto& routine = to_store ? prefs.stores : prefs.parks;
      const auto& all = world.kind_index(to_store ? LocationKind::store : LocationKind::park);
      if (routine.empty() && all.empty()) break;

      LocationId dest = kNoLocation;
      if (rec >= 3) {
        // No new places: pick among already-visited routine spots.
        std::vector<LocationId> known;
        for (LocationId c : routine) {
          if (!visited || in_sorted(*visited, c)) known.push_back(c);
        }
        if (known.empty()) continue;
        dest = known[rng.pick_index(known.size())];
      } else if (!routine.empty() && !(rng.chance(0.2) && !all.empty())) {
        dest = routine[rng.pick_index(routine.size())];
      } else {
        dest = all[rng.pick_index(all.size())];  // exploring somewhere new
      }

      int len = to_store ? 1 + std::min(rng.poisson(1.0), 3) : 2 + std::min(rng.poisson(1.5), 4);
      // Level 3 halves time spent out (or whatever factor is configured).
      if (rec == 3) len = std::max(1, static_cast<int>(std::lround(len * ctx.level3_duration_factor)));

      const Location& dloc = world.locations[static_cast<std::size_t>(dest)];
      bool placed = false;
      for (int attempt = 0; attempt < 3 && !placed; ++attempt) {
        int start = static_cast<int>(rng.uniform_int(kFirstWakingSlot, kSlotsPerDay - len));
        bool free_block = true;
        for (int s = start; s < start + len; ++s) {
          if (grid.at(id, s) != agent.household ||
              grid.occupancy(dest, s) >= dloc.capacity) {
            free_block = false;
            break;
          }
        }
        if (!free_block) continue;
        grid.place_range(id, start, start + len - 1, dest);
        placed = true;

        // Transit legs bracket the visit. Level 4 outings go to a single
        // location only, so no legs.
        if (rec < 4 && !prefs.transit.empty() && rng.chance(0.5)) {
          LocationId line = prefs.transit[rng.pick_index(prefs.transit.size())];
          const Location& tloc = world.locations[static_cast<std::size_t>(line)];
          for (int s : {start - 1, start + len}) {
            if (s >= kFirstWakingSlot && s < kSlotsPerDay && grid.at(id, s) == agent.household &&
                grid.occupancy(line, s) < tloc.capacity) {
              grid.place(id, s, line);
              if (stats) {
                stats->away_minutes[idx] =
                    static_cast<std::uint16_t>(stats->away_minutes[idx] + kSlotMinutes);
              }
            }
          }
          if (visited) insert_sorted(*visited, line);
        }
        if (visited) insert_sorted(*visited, dest);
        if (stats) {
          stats->outings[idx]++;
          stats->away_minutes[idx] =
              static_cast<std::uint16_t>(stats->away_minutes[idx] + len * kSlotMinutes);
        }
      }
    }
  }
}

}  // namespace riskmesh
