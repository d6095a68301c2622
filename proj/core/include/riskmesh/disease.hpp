#pragma once

#include <optional>
#include <vector>

#include "riskmesh/config.hpp"
#include "riskmesh/rng.hpp"
#include "riskmesh/types.hpp"

namespace riskmesh {

// Piecewise-linear within-host load: zero through incubation, linear ramp to
// the plateau, flat plateau, linear decline back to zero.
struct ViralLoadCurve {
  double incubation_days = 0.0;
  double ramp_days = 0.0;
  double plateau_height = 0.0;
  double plateau_days = 0.0;
  double decline_days = 0.0;

  double ramp_end() const { return incubation_days + ramp_days; }
  double plateau_end() const { return ramp_end() + plateau_days; }
  double end() const { return plateau_end() + decline_days; }
};

// Load at `t` days since infection. Negative t is a caller bug.
double viral_load(const ViralLoadCurve& curve, double t);

enum class CourseStage : std::uint8_t { latent, ramp, plateau, decline, over };
CourseStage course_stage(const ViralLoadCurve& curve, double t);

struct DiseaseCourse {
  ViralLoadCurve curve;
  bool asymptomatic = false;
  bool really_sick = false;     // will need a hospital bed
  bool extremely_sick = false;  // will need intensive care
  bool fatal = false;
  double symptom_onset_days = 0.0;  // relative to infection; meaningless if asymptomatic
};

// Severity outcomes for a demographic profile. Probabilities are the
// configured population baselines, bent by age and preexisting conditions;
// the baseline profile (age 30-39, no conditions) reproduces them exactly.
DiseaseCourse sample_disease_course(const DiseaseConfig& cfg, int age, std::uint8_t conditions,
                                    Rng& rng);

// Emission intensity: viral load, damped hard for asymptomatic carriers,
// boosted while the host is actively coughing.
double infectiousness(const DiseaseConfig& cfg, const DiseaseCourse& course, double t,
                      bool coughing_now);

SymptomSet sample_symptoms(const DiseaseConfig& cfg, const DiseaseCourse& course, double t,
                           Rng& rng);

struct EncounterExposure {
  double source_infectiousness = 0.0;
  int duration_min = 0;
  DistanceBand band = DistanceBand::far;
  bool source_masked = false;
  bool source_healthcare_mask = false;  // PPE-grade mask
  bool recipient_hygiene = false;
};

// Per-encounter transmission probability.
double transmission_probability(const DiseaseConfig& cfg, const EncounterExposure& e);

struct TestResult {
  AgentId agent = kNoAgent;
  int requested_day = 0;
  int result_day = 0;
  bool positive = false;
};

// Lab queue with turnaround and optional daily capacity. One outstanding
// request per agent; duplicates are rejected.
class TestLab {
 public:
  explicit TestLab(const TestPolicyConfig& cfg) : cfg_(cfg) {}

  // True if accepted. `infected` is the agent's status at swab time.
  bool request(AgentId agent, int day, bool infected, Rng& rng);
  // Results that become visible on `day`, in request order.
  std::vector<TestResult> collect(int day);
  bool pending(AgentId agent) const;
  int performed_on(int day) const;

 private:
  TestPolicyConfig cfg_;
  std::vector<TestResult> queue_;
  std::vector<AgentId> outstanding_;
  std::vector<std::pair<int, int>> per_day_counts_;
};

struct ColdFluEpisode {
  AgentId agent = kNoAgent;
  int start_day = 0;
  int duration_days = 0;
};

// Weekly draw of unrelated cold/flu cases, weighted toward children and the
// elderly; population rate matches cfg.cold_flu_weekly_rate in expectation.
std::vector<ColdFluEpisode> sample_background_illness(const DiseaseConfig& cfg,
                                                      const std::vector<int>& ages, int week_start,
                                                      Rng& rng);

// Daily symptoms for a background cold; never includes anosmia.
SymptomSet sample_cold_flu_symptoms(Rng& rng);

}  // namespace riskmesh
