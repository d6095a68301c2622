#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "riskmesh/config.hpp"
#include "riskmesh/types.hpp"

namespace riskmesh {

// 16 risk levels, 0..15.
using RiskLevel = int;

inline constexpr int kRiskHorizon = 15;  // 14 past days + today

// One logged proximity event, as the app sees it. No identity, no exact
// timestamp; day granularity only.
struct ContactLogEntry {
  int day = 0;
  int duration_min = 0;
  DistanceBand band = DistanceBand::medium;
  // Latest risk level received over this contact's channel; -1 = none yet.
  int received_level = -1;
  int prior_level = -1;  // what the sender reported before the latest update
  int arrival_day = -1;  // when the latest update arrived
  std::vector<std::uint8_t> level_history;  // every received level, in order
  int cluster = -1;  // filled by cluster_contacts
};

struct PhoneStatics {
  int age_band = 3;  // age decile
  Sex sex = Sex::female;
  std::uint8_t conditions = 0;
  bool healthcare_worker = false;
};

struct PhoneTestRecord {
  int taken_day = 0;
  int known_day = 0;
  bool positive = false;
};

// Everything risk estimation may read. Mirrors what a handset could observe;
// in particular there is no ground-truth infection state here.
struct PhoneData {
  PhoneStatics statics;
  int day_cursor = 0;
  std::vector<std::pair<int, SymptomSet>> symptoms_by_day;  // ascending by day
  std::vector<PhoneTestRecord> test_results;
  std::vector<ContactLogEntry> contacts;

  void record_symptoms(int day, SymptomSet set);
  SymptomSet symptoms_on(int day) const;
  // Drops observations older than `window_days` before day_cursor.
  void purge(int window_days);
};

// Per-day contagiousness estimates for day_cursor-14 .. day_cursor, in [0,1).
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual std::array<double, kRiskHorizon> estimate(const PhoneData& data) const = 0;
  virtual std::string name() const = 0;
};

// Hand-built estimator: a demographic prior plus symptom, test and contact
// evidence folded through an exponential survival combination (monotone in
// every evidence term). Positive tests are separated from all other evidence
// by construction so they always land in the top quantizer bin.
class HeuristicPredictor final : public Predictor {
 public:
  explicit HeuristicPredictor(RiskConfig cfg) : cfg_(std::move(cfg)) {}
  std::array<double, kRiskHorizon> estimate(const PhoneData& data) const override;
  std::string name() const override { return "heuristic-v1"; }

 private:
  RiskConfig cfg_;
};

// 4-bit quantizer. Thresholds are frozen from a calibration run so that the
// 16 bins carry approximately equal mass on that reference distribution.
class Quantizer {
 public:
  // Strictly ascending thresholds in (0,1).
  explicit Quantizer(std::array<double, kRiskLevels - 1> thresholds);

  RiskLevel level(double score) const;
  const std::array<double, kRiskLevels - 1>& thresholds() const { return thresholds_; }

  // Equal-frequency fit; nudges duplicate cut points apart to stay strictly
  // ascending.
  static Quantizer fit(std::vector<double> samples);
  static Quantizer release_default();
  static Quantizer load(const std::string& path);
  void save(const std::string& path) const;

 private:
  std::array<double, kRiskLevels - 1> thresholds_;
};

// Days in the shared window whose quantized level changed; empty = nothing to
// send. Index 0 = day_cursor-14, index 14 = today. Use -1 in `previous` for
// "never sent".
std::vector<int> changed_days(const std::array<RiskLevel, kRiskHorizon>& previous,
                              const std::array<RiskLevel, kRiskHorizon>& current);

// Greedy agglomerative grouping of contact entries into putative people,
// using received-level history plus day proximity. Fills entry.cluster,
// returns the number of clusters.
int cluster_contacts(std::vector<ContactLogEntry>& entries, const RiskConfig& cfg);

// Distance used by the clustering; exposed for tests.
double contact_cluster_distance(const ContactLogEntry& a, const ContactLogEntry& b,
                                const RiskConfig& cfg);

// Recommendation tiers 1..4 from a risk level.
int recommendation_level(RiskLevel level);

struct BehaviorModifiers {
  bool hygiene = false;             // tier 1+
  bool mask_and_distance = false;   // tier 2+
  bool shorten_and_familiar = false;  // tier 3+: halved durations, no new places
  bool quarantine = false;          // tier 4: heavy outing cut, WFH, get tested
};

BehaviorModifiers apply_recommendation(int tier);

}  // namespace riskmesh
