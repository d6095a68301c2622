#pragma once

#include <deque>
#include <memory>
#include <string>
#include <vector>

#include "riskmesh/aggregation.hpp"
#include "riskmesh/config.hpp"
#include "riskmesh/crypto.hpp"
#include "riskmesh/disease.hpp"
#include "riskmesh/encounter.hpp"
#include "riskmesh/itinerary.hpp"
#include "riskmesh/metrics.hpp"
#include "riskmesh/risk.hpp"
#include "riskmesh/transport.hpp"
#include "riskmesh/world.hpp"

namespace riskmesh {

enum class ScenarioKind : std::uint8_t {
  unmitigated,
  social_distancing,
  binary_tracing,
  risk_app,
};

const char* to_string(ScenarioKind k);
ScenarioKind scenario_kind_from_string(const std::string& s);

struct ScenarioSpec;
// Display name; binary tracing is suffixed with its order ("binary_tracing_2").
std::string scenario_label(const ScenarioSpec& spec);

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::unmitigated;
  // Population-wide contact-reduction dial applied from the intervention day.
  // Negative = use the configured default for the kind (the distancing
  // strength for social_distancing, 0 for the app-based policies until the
  // equalizer has picked their values).
  double mobility_scalar = -1.0;
  int tracing_order = 1;  // binary_tracing: 1 or 2
  // risk_app scoring model; null = built-in heuristic.
  std::shared_ptr<const Predictor> predictor;
};

struct SimOptions {
  bool collect_encounters = false;  // retain the full per-day encounter stream
  bool collect_geo = true;          // feed heat/flow aggregation (risk engine runs only)
  // Run the phone risk pipeline and collect scores without ever applying
  // recommendations; used to gather quantizer calibration data.
  bool score_only_risk_engine = false;
  // Test hook: pins every agent to this recommendation tier from the
  // intervention day on (0 = off). Overrides scenario behavior.
  int forced_recommendation = 0;
};

struct TransportSummary {
  std::int64_t updates_sent = 0;
  std::int64_t updates_applied = 0;
  std::int64_t replays_rejected = 0;
  std::int64_t entry_throttled = 0;
  std::int64_t mix_padding = 0;
};

struct RunResult {
  ScenarioKind kind = ScenarioKind::unmitigated;
  std::uint64_t seed = 0;
  std::vector<DailyMetrics> daily;
  InfectionTree tree;
  std::vector<long> infectious_by_day;
  ValidationReport validation;
  Aggregator aggregator;
  TransportSummary transport;
  std::vector<std::vector<Encounter>> encounters_by_day;  // only when collected
  std::vector<double> calibration_scores;  // per phone-day raw scores, when the engine ran

  double post_intervention_mean_contacts = 0.0;
  double post_intervention_mean_rt = 0.0;  // over days with a live cohort estimate
  long final_cumulative_cases = 0;
};

// Who a positive case's app history implicates. First order: everyone the
// case met (app to app) in the trailing window; second order additionally
// pulls in those people's own app contacts. Pure so the policy is testable
// without a simulation around it.
struct TraceTarget {
  AgentId agent = kNoAgent;
  int order = 1;
};
std::vector<TraceTarget> trace_targets(
    const std::vector<std::deque<std::pair<int, AgentId>>>& app_contacts, AgentId positive_case,
    int order, int day, int window_days);

// One scenario run over one world. Construction builds the world; run()
// advances day by day: movement, contacts, transmission, medical events,
// phone risk updates, messaging, and next-day behavior, in that order.
class Simulation {
 public:
  Simulation(const SimConfig& cfg, ScenarioSpec spec, std::uint64_t seed, SimOptions opt = {});
  ~Simulation();

  void run();
  RunResult take_result();
  const World& world() const { return world_; }

 private:
  struct Impl;
  World world_;  // built first; Impl keeps a reference
  std::unique_ptr<Impl> impl_;
};

// Convenience wrapper: build, run, return.
RunResult run_scenario(const SimConfig& cfg, ScenarioSpec spec, std::uint64_t seed,
                       SimOptions opt = {});

}  // namespace riskmesh
