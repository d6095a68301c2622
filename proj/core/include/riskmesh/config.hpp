#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "riskmesh/types.hpp"

namespace riskmesh {

struct GaussianSpec {
  double mean = 0.0;
  double sd = 1.0;
};

// Location counts; 0 means "derive from population".
struct LocationCounts {
  int household = 0;
  int store = 0;
  int park = 0;
  int hospital = 0;
  int icu = 0;
  int nursing_home = 0;
  int workplace = 0;
  int transit = 0;
};

struct WorldConfig {
  int population = 1000;
  int n_days = 30;
  int slot_minutes = kSlotMinutes;  // fixed; validated, not tunable
  LocationCounts locations;
  double app_adoption = 0.6;
  std::uint64_t seed = 1;
  int initial_infected = 10;
  int zone_count = 4;
  // Adds one deliberately tiny zone so aggregate exports exercise lumping.
  bool small_zone_tail = false;
  double employment_rate = 0.55;
  double healthcare_worker_rate = 0.04;
  double nursing_home_rate = 0.25;  // of agents aged 80+
  double discretionary_rate = 1.1;  // mean optional outings per day
  bool weekends = true;
  double weekend_rate_boost = 1.5;
};

struct TestPolicyConfig {
  double false_positive_rate = 0.0;
  double false_negative_rate = 0.10;
  int turnaround_days = 2;
  int daily_capacity = -1;  // -1 = unlimited
  // Chance per day that an agent with enough symptoms seeks a test.
  double symptomatic_seek_rate = 0.18;
  int min_symptoms_to_seek = 3;
};

struct SymptomStageTable {
  // Probability of each symptom per day, indexed by Symptom, for one course
  // stage (ramp, plateau, decline).
  std::array<double, kSymptomCount> ramp{};
  std::array<double, kSymptomCount> plateau{};
  std::array<double, kSymptomCount> decline{};
};

SymptomStageTable default_symptom_table();

struct DiseaseConfig {
  double p_asymptomatic = 0.40;
  double asymptomatic_infectiousness = 0.10;
  double p_really_sick = 0.15;
  double p_extremely_sick_given_really = 0.30;
  double p_fatal = 0.002;
  GaussianSpec incubation{2.5, 1.0};
  GaussianSpec ramp{2.5, 1.0};
  GaussianSpec plateau{5.0, 1.5};
  GaussianSpec decline{5.0, 1.5};
  double min_phase_days = 0.5;
  // Plateau height interpolates linearly across age deciles.
  double plateau_height_young = 0.5;
  double plateau_height_old = 0.9;
  double plateau_height_jitter = 0.05;
  GaussianSpec symptom_onset{2.5, 0.5};
  double cough_infectiousness_boost = 1.5;

  // Transmission kernel.
  double base_transmission_rate = 0.0135;  // calibrated so unmitigated Rt sits a bit above 2
  double duration_factor_cap = 8.0;        // duration/15min, capped
  double distance_medium_factor = 0.3;
  double mask_efficacy_healthcare = 0.98;
  double mask_efficacy_other = 0.32;
  double baseline_mask_rate = 0.10;
  double hygiene_transmission_factor = 0.85;
  bool environmental_infection = true;
  double environmental_coupling = 0.015;
  int environmental_decay_slots = 4;  // hazard halves roughly every hour

  double cold_flu_weekly_rate = 0.01;
  TestPolicyConfig test;
  SymptomStageTable symptoms = default_symptom_table();
};

struct RiskConfig {
  int window_days = 14;
  // Optional file with 15 ascending thresholds; empty = built-in release set.
  std::string thresholds_file;
  double cluster_distance_threshold = 0.35;
  double cluster_day_gap_penalty = 0.05;

  // Heuristic estimator shape. Evidence terms enter an exponential survival
  // combination, so every term is monotone.
  double prior_base = 0.01;
  double prior_age = 0.02;
  double prior_conditions = 0.01;
  double cold_flu_discount = 0.5;
  double contact_scale = 0.9;
  double contact_evidence_cap = 2.0;
  double symptom_evidence_cap = 2.5;
  double test_evidence = 7.0;
  int contagious_lead_days = 2;   // contagious window opens this many days before evidence day
  int contagious_tail_days = 9;   // and closes this many after
};

struct TransportConfig {
  int mix_servers = 3;
  int batch_threshold = 8;
  bool null_crypto = true;  // simulations default to the fast stand-in cipher
  std::int64_t daily_post_quota = 1000;
  // Messages dispatched later than this fraction of a day reach their mailbox
  // only after the next day's mixing round.
  double same_day_cutoff = 0.75;
};

struct ScenarioConfig {
  int intervention_day = 4;
  double distancing_strength = 0.55;
  int quarantine_days = 14;
  int secondary_quarantine_days = 7;
  double level3_duration_factor = 0.5;
  double level4_outing_factor = 0.1;
};

struct AggregationConfig {
  double opt_in_rate = 1.0;
  int retention_days = 90;
  int phone_log_retention_days = 30;
};

struct SimConfig {
  WorldConfig world;
  DiseaseConfig disease;
  RiskConfig risk;
  TransportConfig transport;
  ScenarioConfig scenario;
  AggregationConfig aggregation;

  // Throws ConfigError naming the offending field.
  void validate() const;
};

// Fills unset (zero) location counts from the population.
LocationCounts resolve_location_counts(const WorldConfig& w);

SimConfig load_config(const std::string& path);       // throws ConfigError / std::ios errors
SimConfig parse_config(const std::string& json_text); // throws ConfigError
std::string config_to_json(const SimConfig& cfg);
// Stable hex digest of the fully-resolved configuration.
std::string config_digest(const SimConfig& cfg);

}  // namespace riskmesh
