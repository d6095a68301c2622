#pragma once

#include <array>
#include <vector>

#include "riskmesh/config.hpp"
#include "riskmesh/types.hpp"

namespace riskmesh {

// Preexisting-condition bits.
enum Condition : std::uint8_t {
  kConditionDiabetes = 1u << 0,
  kConditionHeart = 1u << 1,
  kConditionLung = 1u << 2,
  kConditionImmunosuppressed = 1u << 3,
};

// Immutable demographics; disease and behavior state live in the simulation.
struct Agent {
  AgentId id = kNoAgent;
  int age = 0;
  Sex sex = Sex::female;
  std::uint8_t conditions = 0;
  double carefulness = 0.5;  // in [0,1]
  bool healthcare_worker = false;
  bool has_app = false;
  double mask_propensity = 0.0;
  LocationId household = kNoLocation;  // kind household or nursing_home
  LocationId workplace = kNoLocation;  // kNoLocation if not employed
  ZoneId home_zone = 0;
};

struct Location {
  LocationId id = kNoLocation;
  LocationKind kind = LocationKind::household;
  int capacity = 0;
  ZoneId zone = 0;
};

// Places an agent routinely picks from when going out.
struct AgentPreferences {
  std::vector<LocationId> stores;
  std::vector<LocationId> parks;
  std::vector<LocationId> transit;
};

struct World {
  SimConfig cfg;
  std::vector<Agent> agents;
  std::vector<Location> locations;
  std::vector<AgentPreferences> prefs;
  std::array<std::vector<LocationId>, kLocationKinds> by_kind;
  int zone_total = 0;                 // includes the small tail zone if configured
  std::vector<int> zone_population;  // residents per zone
  std::vector<AgentId> seed_infections;

  const std::vector<LocationId>& kind_index(LocationKind k) const {
    return by_kind[static_cast<std::size_t>(k)];
  }
  int age_decile(AgentId a) const {
    int d = agents[static_cast<std::size_t>(a)].age / 10;
    return d > 9 ? 9 : d;
  }
};

// Deterministic for a given (config, seed): demographics, households, zones,
// app ownership (exactly round(adoption * population) phones), and the day-0
// exposure seeds. Throws ConfigError on invalid input.
World build_world(const SimConfig& cfg);

}  // namespace riskmesh
