#pragma once

#include <array>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "riskmesh/types.hpp"

namespace riskmesh {

struct DailyMetrics {
  int day = 0;
  long new_infections = 0;
  long cumulative_cases = 0;
  double rt_estimate = 0.0;
  bool rt_carried = false;  // cohort was empty, value carried forward
  double mean_contacts_per_agent = 0.0;
  long hospitalized = 0;
  long icu = 0;
  long tests_performed = 0;
  long quarantined_agent_days = 0;
};

// One record per infected agent. Seeds have no parent; location-mediated
// infections keep the location but also no agent parent.
struct InfectionEdge {
  AgentId child = kNoAgent;
  AgentId parent = kNoAgent;
  LocationId location = kNoLocation;
  LocationKind location_kind = LocationKind::household;
  int day = 0;
  bool seed = false;
};

class InfectionTree {
 public:
  // Rejects a second infection of the same child: the tree is a forest.
  void add(InfectionEdge e);

  const std::vector<InfectionEdge>& edges() const { return edges_; }
  long node_count() const { return static_cast<long>(edges_.size()); }
  bool contains(AgentId a) const { return infected_.count(a) != 0; }
  int out_degree(AgentId a) const;

 private:
  std::vector<InfectionEdge> edges_;
  std::unordered_set<AgentId> infected_;
  std::unordered_map<AgentId, int> out_degree_;
};

// Mean out-degree of agents whose infectious period closed within
// [day - window, day]. Empty cohort yields nothing; the caller decides
// what to carry forward.
std::optional<double> estimate_rt(const InfectionTree& tree,
                                  const std::vector<std::pair<AgentId, int>>& course_end_days,
                                  int day, int window_days);

struct ValidationReport {
  // Infections transmitted per closed case, split by where they happened.
  // The kinds sum to overall_r by construction.
  std::array<double, 8> r_by_location_kind{};
  double overall_r = 0.0;
  long closed_cases = 0;
  double encounter_transmission_rate = 0.0;  // infections per recorded encounter
  double secondary_attack_rate = 0.0;        // tested positive / ever symptomatic
  std::array<double, 10> symptomatic_fraction_by_age{};
  bool infectious_curve_unimodal = true;
  double cluster_purity = -1.0;  // -1 when no risk engine ran
};

// Forgiving single-peak check after a centered moving-average smooth.
bool is_unimodal(const std::vector<double>& series, int smooth_window);

}  // namespace riskmesh
