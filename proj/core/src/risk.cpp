#include "riskmesh/risk.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace riskmesh {

void PhoneData::record_symptoms(int day, SymptomSet set) {
  for (auto& [d, s] : symptoms_by_day) {
    if (d == day) {
      s |= set;
      return;
    }
  }
  symptoms_by_day.emplace_back(day, set);
  std::sort(symptoms_by_day.begin(), symptoms_by_day.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
}

SymptomSet PhoneData::symptoms_on(int day) const {
  for (const auto& [d, s] : symptoms_by_day) {
    if (d == day) return s;
  }
  return 0;
}

void PhoneData::purge(int window_days) {
  const int cutoff = day_cursor - window_days;
  std::erase_if(symptoms_by_day, [cutoff](const auto& p) { return p.first < cutoff; });
  std::erase_if(test_results, [cutoff](const auto& t) { return t.taken_day < cutoff; });
  std::erase_if(contacts, [cutoff](const auto& c) { return c.day < cutoff; });
}

namespace {

// Per-symptom diagnostic weights; distinctive symptoms count for more.
constexpr std::array<double, kSymptomCount> kSymptomWeights = {
    0.30,  // fever
    0.20,  // cough
    0.10,  // fatigue
    0.45,  // anosmia
    0.10,  // aches
    0.08,  // sore_throat
    0.05,  // runny_nose
    0.30,  // shortness_of_breath
    0.06,  // headache
    0.08,  // nausea
};

// Contagiousness kernel around a symptomatic day: infection preceded the
// symptoms, so the window opens a couple of days before and trails after.
double symptom_kernel(int delta) {
  if (delta < -2 || delta > 9) return 0.0;
  if (delta < 0) return 0.6;
  if (delta <= 6) return 1.0;
  return 0.5 - 0.07 * (delta - 7);  // 7..9 -> 0.5, 0.43, 0.36
}

// Contagiousness kernel after a risky encounter on day 0: the recipient, if
// infected there, turns contagious after incubation.
double contact_kernel(int delta) {
  if (delta < 2 || delta > 13) return 0.0;
  if (delta == 2) return 0.3;
  if (delta == 3) return 0.7;
  if (delta <= 10) return 1.0;
  return 1.0 - 0.25 * (delta - 10);  // 11..13 -> 0.75, 0.5, 0.25
}

// Weight of raw contact volume relative to level-weighted evidence; small
// enough that one genuinely flagged contact still dominates a full day of
// silent ones.
constexpr double kAmbientWeight = 0.003;

}  // namespace

std::array<double, kRiskHorizon> HeuristicPredictor::estimate(const PhoneData& data) const {
  const int today = data.day_cursor;
  const int first_day = today - (kRiskHorizon - 1);

  double prior = cfg_.prior_base + cfg_.prior_age * (data.statics.age_band / 9.0) +
                 (data.statics.conditions ? cfg_.prior_conditions : 0.0);

  std::array<double, kRiskHorizon> sym{};
  std::array<double, kRiskHorizon> con{};
  std::array<double, kRiskHorizon> test{};
  std::array<double, kRiskHorizon> damp;
  damp.fill(1.0);

  // Symptom evidence, discounted when the day's set looks like a seasonal
  // cold (unless fever and anosmia co-occur, which a cold does not produce).
  for (const auto& [day, set] : data.symptoms_by_day) {
    if (set == 0 || day > today) continue;
    const bool specific =
        has_symptom(set, Symptom::fever) && has_symptom(set, Symptom::anosmia);
    double w = 0.0;
    for (int s = 0; s < kSymptomCount; ++s) {
      if (!(set & (1u << s))) continue;
      double ws = kSymptomWeights[static_cast<std::size_t>(s)];
      if (!specific && (kColdFluShared & (1u << s))) ws *= cfg_.cold_flu_discount;
      w += ws;
    }
    for (int i = 0; i < kRiskHorizon; ++i) {
      sym[static_cast<std::size_t>(i)] += w * symptom_kernel(first_day + i - day);
    }
  }

  // Test evidence. Positive results dominate; negative ones damp everything
  // else near the swab day (false negatives keep this from being absolute).
  for (const auto& t : data.test_results) {
    if (t.known_day > today) continue;
    if (t.positive) {
      for (int i = 0; i < kRiskHorizon; ++i) {
        int d = first_day + i;
        if (d >= t.taken_day - 5 && d <= t.taken_day + 11) {
          test[static_cast<std::size_t>(i)] = cfg_.test_evidence;
        }
      }
    } else {
      for (int i = 0; i < kRiskHorizon; ++i) {
        int d = first_day + i;
        if (d >= t.taken_day - 1 && d <= t.taken_day + 1) {
          damp[static_cast<std::size_t>(i)] = 0.4;
        }
      }
    }
  }

  // Contact evidence. Entries in a cluster are treated as the same person:
  // within a cluster a day takes the strongest single signal, while distinct
  // clusters (distinct people) add up. On top of the level-weighted part,
  // sheer contact volume carries a small ambient exposure term; it matters
  // on its own (encounter count is risk even when nobody has reported), and
  // it keeps the raw score distribution smooth enough that equal-frequency
  // quantization has meaningful bins.
  int n_clusters = 0;
  for (const auto& e : data.contacts) n_clusters = std::max(n_clusters, e.cluster + 1);
  std::vector<std::array<double, kRiskHorizon>> per_cluster(
      static_cast<std::size_t>(n_clusters));
  std::array<double, kRiskHorizon> unclustered{};
  std::array<double, kRiskHorizon> ambient{};
  for (const auto& e : data.contacts) {
    double dur = std::min(static_cast<double>(e.duration_min) / 120.0, 1.0);
    double prox = e.band == DistanceBand::medium ? 0.6 : 1.0;
    for (int i = 0; i < kRiskHorizon; ++i) {
      ambient[static_cast<std::size_t>(i)] +=
          dur * prox * std::exp(-std::abs(first_day + i - e.day) / 4.0);
    }
    if (e.received_level <= 0) continue;  // no word, or the lowest bin: no signal
    double strength =
        (static_cast<double>(e.received_level) / (kRiskLevels - 1)) * dur * prox;
    for (int i = 0; i < kRiskHorizon; ++i) {
      double v = strength * contact_kernel(first_day + i - e.day);
      if (v <= 0.0) continue;
      auto ii = static_cast<std::size_t>(i);
      if (e.cluster >= 0) {
        auto& row = per_cluster[static_cast<std::size_t>(e.cluster)];
        row[ii] = std::max(row[ii], v);
      } else {
        unclustered[ii] += v;
      }
    }
  }
  for (int i = 0; i < kRiskHorizon; ++i) {
    auto ii = static_cast<std::size_t>(i);
    double total = unclustered[ii];
    for (const auto& row : per_cluster) total += row[ii];
    con[ii] = cfg_.contact_scale * (total + kAmbientWeight * ambient[ii]);
  }

  std::array<double, kRiskHorizon> out{};
  for (int i = 0; i < kRiskHorizon; ++i) {
    auto ii = static_cast<std::size_t>(i);
    double evidence = damp[ii] * (std::min(sym[ii], cfg_.symptom_evidence_cap) +
                                  std::min(con[ii], cfg_.contact_evidence_cap)) +
                      test[ii];
    double score = 1.0 - (1.0 - prior) * std::exp(-evidence);
    out[ii] = std::clamp(score, 0.0, 0.999999);
  }
  return out;
}

namespace {
// Placeholder ladder until the calibration freeze writes the real values.
constexpr std::array<double, kRiskLevels - 1> kReleaseThresholds = {
    0.0625, 0.125, 0.1875, 0.25, 0.3125, 0.375, 0.4375, 0.5,
    0.5625, 0.625, 0.6875, 0.75, 0.8125, 0.875, 0.9375};
}  // namespace

Quantizer::Quantizer(std::array<double, kRiskLevels - 1> thresholds)
    : thresholds_(thresholds) {
  for (int i = 0; i < kRiskLevels - 1; ++i) {
    double t = thresholds_[static_cast<std::size_t>(i)];
    if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("quantizer thresholds must lie in (0,1)");
    if (i > 0 && t <= thresholds_[static_cast<std::size_t>(i - 1)]) {
      throw std::invalid_argument("quantizer thresholds must be strictly ascending");
    }
  }
}

RiskLevel Quantizer::level(double score) const {
  if (!(score >= 0.0 && score <= 1.0)) {
    throw std::domain_error("risk score outside [0,1]");
  }
  auto it = std::upper_bound(thresholds_.begin(), thresholds_.end(), score);
  return static_cast<RiskLevel>(it - thresholds_.begin());
}

Quantizer Quantizer::fit(std::vector<double> samples) {
  if (samples.size() < static_cast<std::size_t>(kRiskLevels)) {
    throw std::invalid_argument("quantizer fit needs at least 16 samples");
  }
  std::sort(samples.begin(), samples.end());
  std::array<double, kRiskLevels - 1> t{};
  for (int k = 1; k < kRiskLevels; ++k) {
    std::size_t idx = (samples.size() * static_cast<std::size_t>(k)) / kRiskLevels;
    t[static_cast<std::size_t>(k - 1)] = samples[idx];
  }
  // Keep the cut points strictly ascending and inside (0,1) even when the
  // sample has atoms.
  for (int k = 0; k < kRiskLevels - 1; ++k) {
    auto kk = static_cast<std::size_t>(k);
    double floor = k == 0 ? 0.0 : t[kk - 1];
    if (t[kk] <= floor) t[kk] = std::nextafter(floor, 2.0);
    if (t[kk] >= 1.0) t[kk] = std::nextafter(1.0, 0.0);
  }
  for (int k = kRiskLevels - 2; k > 0; --k) {
    auto kk = static_cast<std::size_t>(k);
    if (t[kk - 1] >= t[kk]) t[kk - 1] = std::nextafter(t[kk], 0.0);
  }
  return Quantizer(t);
}

Quantizer Quantizer::release_default() {
  // Fitted on the frozen calibration run (1000 agents, 30 days, no
  // intervention, seed 1); regenerate with `tools: riskmesh calibrate` and
  // keep core/data/quantizer-thresholds.txt in sync.
  return Quantizer(kReleaseThresholds);
}

Quantizer Quantizer::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open thresholds file: " + path);
  std::array<double, kRiskLevels - 1> t{};
  for (int i = 0; i < kRiskLevels - 1; ++i) {
    if (!(in >> t[static_cast<std::size_t>(i)])) {
      throw std::invalid_argument("thresholds file needs 15 numbers: " + path);
    }
  }
  return Quantizer(t);
}

void Quantizer::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot write thresholds file: " + path);
  char buf[64];
  for (double t : thresholds_) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", t);
    out << buf;
  }
}

std::vector<int> changed_days(const std::array<RiskLevel, kRiskHorizon>& previous,
                              const std::array<RiskLevel, kRiskHorizon>& current) {
  std::vector<int> out;
  for (int i = 0; i < kRiskHorizon; ++i) {
    if (previous[static_cast<std::size_t>(i)] != current[static_cast<std::size_t>(i)]) {
      out.push_back(i);
    }
  }
  return out;
}

double contact_cluster_distance(const ContactLogEntry& a, const ContactLogEntry& b,
                                const RiskConfig& cfg) {
  std::size_t len = std::max(a.level_history.size(), b.level_history.size());
  double mismatches = 0.0;
  if (len > 0) {
    for (std::size_t i = 0; i < len; ++i) {
      int va = i < a.level_history.size() ? a.level_history[i] : -1;
      int vb = i < b.level_history.size() ? b.level_history[i] : -1;
      if (va != vb) mismatches += 1.0;
    }
    mismatches /= static_cast<double>(len);
  }
  return mismatches + cfg.cluster_day_gap_penalty * std::abs(a.day - b.day);
}

int cluster_contacts(std::vector<ContactLogEntry>& entries, const RiskConfig& cfg) {
  std::vector<std::size_t> representative;  // index of each cluster's first entry
  for (std::size_t i = 0; i < entries.size(); ++i) {
    int best = -1;
    double best_dist = cfg.cluster_distance_threshold;
    // Entries arrive day-ordered, so representatives are day-ordered too;
    // scanning newest-first lets the day-gap penalty cut the search short.
    for (std::size_t c = representative.size(); c-- > 0;) {
      const ContactLogEntry& rep = entries[representative[c]];
      if (cfg.cluster_day_gap_penalty * (entries[i].day - rep.day) >= best_dist) break;
      double d = contact_cluster_distance(entries[i], rep, cfg);
      if (d < best_dist) {
        best_dist = d;
        best = static_cast<int>(c);
      }
    }
    if (best < 0) {
      best = static_cast<int>(representative.size());
      representative.push_back(i);
    }
    entries[i].cluster = best;
  }
  return static_cast<int>(representative.size());
}

int recommendation_level(RiskLevel level) {
  if (level <= 1) return 1;
  if (level <= 3) return 2;
  if (level <= 5) return 3;
  return 4;
}

BehaviorModifiers apply_recommendation(int tier) {
  BehaviorModifiers m;
  m.hygiene = tier >= 1;
  m.mask_and_distance = tier >= 2;
  m.shorten_and_familiar = tier >= 3;
  m.quarantine = tier >= 4;
  return m;
}

}  // namespace riskmesh
