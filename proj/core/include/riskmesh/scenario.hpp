#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "riskmesh/config.hpp"
#include "riskmesh/simulation.hpp"

namespace riskmesh {

// Outcome of tuning one scenario's mobility dial toward the common target.
struct EqualizationReport {
  double scalar = 0.0;            // dial the search settled on
  double achieved_contacts = 0.0; // post-intervention mean at that dial
  double target_contacts = 0.0;
  double relative_gap = 0.0;      // |achieved - target| / target
  bool converged = false;
  int evaluations = 0;            // measure() calls spent
};

struct EqualizeOptions {
  int max_evaluations = 40;
  double tolerance = 0.02;  // relative
  // Dial bracket. The high end is full distancing; the low end goes negative,
  // which boosts voluntary outings: policies that quarantine people can push
  // contacts below the reference, and the only way to equalize is to let
  // everyone else move more.
  double scalar_lo = -3.0;
  double scalar_hi = 1.0;
};

// Root-finds measure(scalar) == target on a monotone nonincreasing measure
// (regula falsi with the Illinois step, plus a bracketing probe). The first
// probe is `default_scalar`, so a scenario already on target returns it
// unchanged after one evaluation. Never throws on non-convergence; the
// report carries the achieved gap.
EqualizationReport equalize_scalar(const std::function<double(double)>& measure,
                                   double default_scalar, double target,
                                   const EqualizeOptions& opt = {});

// One scenario arm of the comparison: its spec (with the equalized dial),
// the tuning report, and the per-seed final runs.
struct ArmOutcome {
  std::string label;
  ScenarioSpec spec;
  EqualizationReport eq;
  std::vector<RunResult> runs;  // aligned with the seed list
  double mean_final_cases = 0.0;
  double mean_post_rt = 0.0;
  double mean_post_contacts = 0.0;
};

struct ComparisonOptions {
  int equalize_seed_count = 3;  // leading seeds used while tuning
  EqualizeOptions equalize;
  int threads = 1;
  bool collect_geo = false;  // aggregation output is not part of the comparison
};

struct ComparisonResult {
  double target_contacts = 0.0;  // the distancing arm's post-intervention mean
  std::vector<ArmOutcome> arms;  // unmitigated, distancing, tracing x2, app
  std::string ordering_verdict;  // "expected", "violated: ...", or "insufficient seeds..."
  bool ordering_ok = false;
  std::vector<std::string> warnings;
};

// Runs the five-arm comparison (binary tracing at both orders) over the seed
// list: measures the distancing arm's post-intervention contacts, tunes the
// other intervention arms' dials to match it, then runs every arm on every
// seed and checks the expected case ordering. Fewer than three seeds yields
// an "insufficient seeds" verdict instead of a pass/fail call.
ComparisonResult run_comparison(const SimConfig& cfg, const std::vector<std::uint64_t>& seeds,
                                const ComparisonOptions& opt = {});

}  // namespace riskmesh
