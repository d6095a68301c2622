#include "riskmesh/disease.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace riskmesh {

double viral_load(const ViralLoadCurve& curve, double t) {
  if (t < 0.0) throw std::domain_error("viral_load: negative time since infection");
  if (t <= curve.incubation_days) return 0.0;
  if (t < curve.ramp_end()) {
    return curve.plateau_height * (t - curve.incubation_days) / curve.ramp_days;
  }
  if (t <= curve.plateau_end()) return curve.plateau_height;
  if (t < curve.end()) {
    return curve.plateau_height * (curve.end() - t) / curve.decline_days;
  }
  return 0.0;
}

CourseStage course_stage(const ViralLoadCurve& curve, double t) {
  if (t < curve.incubation_days) return CourseStage::latent;
  if (t < curve.ramp_end()) return CourseStage::ramp;
  if (t <= curve.plateau_end()) return CourseStage::plateau;
  if (t < curve.end()) return CourseStage::decline;
  return CourseStage::over;
}

namespace {

// Severity bends by age decile, centered on 1.0 for the 30-39 band.
double severity_age_factor(int age) {
  if (age < 10) return 0.35;
  if (age < 20) return 0.45;
  if (age < 30) return 0.8;
  if (age < 40) return 1.0;
  if (age < 50) return 1.3;
  if (age < 60) return 1.8;
  if (age < 70) return 2.6;
  if (age < 80) return 3.6;
  return 5.0;
}

double fatality_age_factor(int age) {
  if (age < 30) return 0.15;
  if (age < 40) return 1.0;
  if (age < 50) return 2.5;
  if (age < 60) return 6.0;
  if (age < 70) return 15.0;
  if (age < 80) return 40.0;
  return 90.0;
}

double asymptomatic_age_factor(int age) {
  if (age < 20) return 1.25;
  if (age < 40) return 1.0;
  if (age < 65) return 0.9;
  return 0.7;
}

int condition_count(std::uint8_t mask) { return __builtin_popcount(mask); }

}  // namespace

DiseaseCourse sample_disease_course(const DiseaseConfig& cfg, int age, std::uint8_t conditions,
                                    Rng& rng) {
  DiseaseCourse c;
  const double lo = cfg.min_phase_days;
  c.curve.incubation_days = rng.truncated_normal(cfg.incubation.mean, cfg.incubation.sd, lo);
  c.curve.ramp_days = rng.truncated_normal(cfg.ramp.mean, cfg.ramp.sd, lo);
  c.curve.plateau_days = rng.truncated_normal(cfg.plateau.mean, cfg.plateau.sd, lo);
  c.curve.decline_days = rng.truncated_normal(cfg.decline.mean, cfg.decline.sd, lo);

  int decile = std::min(age / 10, 9);
  double height = cfg.plateau_height_young +
                  (cfg.plateau_height_old - cfg.plateau_height_young) * (decile / 9.0);
  height += rng.normal(0.0, cfg.plateau_height_jitter);
  c.curve.plateau_height = std::clamp(height, 0.05, 1.0);

  const double cond_boost = 1.0 + 0.35 * condition_count(conditions);
  const double p_asym = std::min(0.95, cfg.p_asymptomatic * asymptomatic_age_factor(age));
  c.asymptomatic = rng.chance(p_asym);
  // Hospitalization implies symptoms, so the draw happens conditional on a
  // symptomatic course but is rescaled to keep the configured probability as
  // the unconditional marginal.
  const double p_really = std::min(
      0.95, cfg.p_really_sick * severity_age_factor(age) * cond_boost / (1.0 - p_asym));
  c.really_sick = !c.asymptomatic && rng.chance(p_really);
  c.extremely_sick = c.really_sick && rng.chance(cfg.p_extremely_sick_given_really);
  c.fatal = rng.chance(std::min(0.5, cfg.p_fatal * fatality_age_factor(age) * cond_boost));
  if (c.fatal) {
    c.asymptomatic = false;
    c.really_sick = true;
    c.extremely_sick = true;
  }
  c.symptom_onset_days =
      rng.truncated_normal(cfg.symptom_onset.mean, cfg.symptom_onset.sd, cfg.min_phase_days);
  return c;
}

double infectiousness(const DiseaseConfig& cfg, const DiseaseCourse& course, double t,
                      bool coughing_now) {
  double load = viral_load(course.curve, t);
  if (course.asymptomatic) return load * cfg.asymptomatic_infectiousness;
  return coughing_now ? load * cfg.cough_infectiousness_boost : load;
}

SymptomSet sample_symptoms(const DiseaseConfig& cfg, const DiseaseCourse& course, double t,
                           Rng& rng) {
  if (course.asymptomatic || t < course.symptom_onset_days) return 0;
  const std::array<double, kSymptomCount>* row = nullptr;
  switch (course_stage(course.curve, t)) {
    case CourseStage::ramp: row = &cfg.symptoms.ramp; break;
    case CourseStage::plateau: row = &cfg.symptoms.plateau; break;
    case CourseStage::decline: row = &cfg.symptoms.decline; break;
    default: return 0;
  }
  // The really sick skew toward the severe end of the table.
  double boost = course.extremely_sick ? 1.5 : course.really_sick ? 1.25 : 1.0;
  SymptomSet set = 0;
  for (int i = 0; i < kSymptomCount; ++i) {
    if (rng.chance(std::min(0.97, (*row)[static_cast<std::size_t>(i)] * boost))) {
      set |= static_cast<SymptomSet>(1u << i);
    }
  }
  return set;
}

double transmission_probability(const DiseaseConfig& cfg, const EncounterExposure& e) {
  if (e.band == DistanceBand::far || e.source_infectiousness <= 0.0) return 0.0;
  double p = cfg.base_transmission_rate * e.source_infectiousness;
  p *= std::min(static_cast<double>(e.duration_min) / kSlotMinutes, cfg.duration_factor_cap);
  if (e.band == DistanceBand::medium) p *= cfg.distance_medium_factor;
  if (e.source_masked) {
    p *= 1.0 - (e.source_healthcare_mask ? cfg.mask_efficacy_healthcare : cfg.mask_efficacy_other);
  }
  if (e.recipient_hygiene) p *= cfg.hygiene_transmission_factor;
  return std::clamp(p, 0.0, 0.95);
}

bool TestLab::request(AgentId agent, int day, bool infected, Rng& rng) {
  if (pending(agent)) return false;
  if (cfg_.daily_capacity >= 0 && performed_on(day) >= cfg_.daily_capacity) return false;

  TestResult r;
  r.agent = agent;
  r.requested_day = day;
  r.result_day = day + cfg_.turnaround_days;
  if (infected) {
    r.positive = !rng.chance(cfg_.false_negative_rate);
  } else {
    r.positive = rng.chance(cfg_.false_positive_rate);
  }
  queue_.push_back(r);
  outstanding_.push_back(agent);
  for (auto& [d, c] : per_day_counts_) {
    if (d == day) {
      ++c;
      return true;
    }
  }
  per_day_counts_.emplace_back(day, 1);
  return true;
}

std::vector<TestResult> TestLab::collect(int day) {
  std::vector<TestResult> ready;
  std::vector<TestResult> rest;
  rest.reserve(queue_.size());
  for (const auto& r : queue_) {
    if (r.result_day <= day) {
      ready.push_back(r);
      std::erase(outstanding_, r.agent);
    } else {
      rest.push_back(r);
    }
  }
  queue_.swap(rest);
  return ready;
}

bool TestLab::pending(AgentId agent) const {
  return std::find(outstanding_.begin(), outstanding_.end(), agent) != outstanding_.end();
}

int TestLab::performed_on(int day) const {
  for (const auto& [d, c] : per_day_counts_) {
    if (d == day) return c;
  }
  return 0;
}

std::vector<ColdFluEpisode> sample_background_illness(const DiseaseConfig& cfg,
                                                      const std::vector<int>& ages, int week_start,
                                                      Rng& rng) {
  // Age weights normalized so the population-wide weekly rate is preserved.
  auto weight = [](int age) { return age < 15 ? 1.8 : age >= 70 ? 1.4 : 0.85; };
  double mean_w = 0.0;
  for (int a : ages) mean_w += weight(a);
  if (ages.empty() || mean_w <= 0.0) return {};
  mean_w /= static_cast<double>(ages.size());

  std::vector<ColdFluEpisode> out;
  for (std::size_t i = 0; i < ages.size(); ++i) {
    double p = cfg.cold_flu_weekly_rate * weight(ages[i]) / mean_w;
    if (!rng.chance(p)) continue;
    ColdFluEpisode e;
    e.agent = static_cast<AgentId>(i);
    e.start_day = week_start + static_cast<int>(rng.uniform_int(0, 6));
    e.duration_days = static_cast<int>(rng.uniform_int(3, 7));
    out.push_back(e);
  }
  return out;
}

SymptomSet sample_cold_flu_symptoms(Rng& rng) {
  SymptomSet set = 0;
  auto maybe = [&](Symptom s, double p) {
    if (rng.chance(p)) set |= symptom_bit(s);
  };
  maybe(Symptom::cough, 0.45);
  maybe(Symptom::fatigue, 0.50);
  maybe(Symptom::sore_throat, 0.45);
  maybe(Symptom::runny_nose, 0.60);
  maybe(Symptom::headache, 0.30);
  maybe(Symptom::fever, 0.10);
  maybe(Symptom::aches, 0.20);
  return set;
}

}  // namespace riskmesh
