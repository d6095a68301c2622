#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "riskmesh/aggregation.hpp"
#include "riskmesh/metrics.hpp"
#include "riskmesh/scenario.hpp"
#include "riskmesh/simulation.hpp"

namespace riskmesh {

// Fixed-format number rendering (%.10g) so identical runs write identical
// bytes; all writers below rely on it.
std::string format_number(double v);

// day,new_infections,cumulative_cases,rt,rt_carried,mean_contacts_per_agent,
// hospitalized,icu,tests_performed,quarantined_agent_days
void write_metrics_csv(const std::string& path, const std::vector<DailyMetrics>& daily);

// child,parent,day,location_kind. Roots carry parent -1; planted cases say
// "seed", environmental ones name the venue kind.
void write_tree_csv(const std::string& path, const InfectionTree& tree);

// Epidemiological sanity metrics plus the transport counters for one run.
void write_validation_json(const std::string& path, const RunResult& run);

// zone,day,count,l0..l15,m0..m15 / home_zone,contact_zone,day,count,l0..l15.
// Small zones appear as "lumped".
void write_heat_csv(const std::string& path, const Aggregator& agg, int n_days);
void write_flow_csv(const std::string& path, const Aggregator& agg, int n_days);

// day,agent_a,agent_b,start_slot,duration_min,distance_band,location_kind
void write_encounters_csv(const std::string& path,
                          const std::vector<std::vector<Encounter>>& by_day,
                          const World& world);

// day,scenario,cumulative_cases,rt — per-day cross-seed means, one row per
// arm per day, ready to plot as one curve per scenario.
void write_plotdata_csv(const std::string& path, const ComparisonResult& cmp);

void write_comparison_json(const std::string& path, const ComparisonResult& cmp,
                           const std::vector<std::uint64_t>& seeds);

void write_manifest_json(const std::string& path, const SimConfig& cfg,
                         const std::vector<std::uint64_t>& seeds, const std::string& scenario,
                         const std::vector<std::string>& outputs, long long wall_ms);

}  // namespace riskmesh
