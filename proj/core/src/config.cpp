#include "riskmesh/config.hpp"

#include <sodium.h>

#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

namespace riskmesh {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::string& section,
                std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError(section.empty() ? it.key() : section + "." + it.key(),
                        "unknown configuration key");
    }
  }
}

template <typename T>
void get_if(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

void get_gaussian(const json& j, const std::string& section, const char* key, GaussianSpec& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  check_keys(*it, section + "." + key, {"mean", "sd"});
  get_if(*it, "mean", out.mean);
  get_if(*it, "sd", out.sd);
}

json gaussian_json(const GaussianSpec& g) { return json{{"mean", g.mean}, {"sd", g.sd}}; }

void get_symptom_row(const json& j, const std::string& field, std::array<double, kSymptomCount>& out) {
  if (!j.is_array() || j.size() != kSymptomCount) {
    throw ConfigError(field, "expected an array of 10 per-symptom probabilities");
  }
  for (int i = 0; i < kSymptomCount; ++i) out[static_cast<std::size_t>(i)] = j[static_cast<std::size_t>(i)].get<double>();
}

void require_unit(double v, const char* field) {
  if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(field, "must lie in [0, 1]");
}

void require_positive(double v, const char* field) {
  if (!(v > 0.0)) throw ConfigError(field, "must be positive");
}

}  // namespace

SymptomStageTable default_symptom_table() {
  SymptomStageTable t;
  //             fever  cough  fatig  anosm  aches  thrt   runny  sob    head   nausea
  t.ramp =    {0.35, 0.40, 0.50, 0.15, 0.30, 0.25, 0.15, 0.10, 0.25, 0.08};
  t.plateau = {0.45, 0.55, 0.65, 0.25, 0.35, 0.20, 0.10, 0.25, 0.25, 0.10};
  t.decline = {0.15, 0.40, 0.55, 0.20, 0.20, 0.10, 0.08, 0.15, 0.15, 0.05};
  return t;
}

LocationCounts resolve_location_counts(const WorldConfig& w) {
  LocationCounts c = w.locations;
  int pop = w.population;
  auto fallback = [](int v, int def) { return v > 0 ? v : def; };
  // household 0 keeps meaning "derive from sampled household sizes".
  c.store = fallback(c.store, std::max(2, pop / 100));
  c.park = fallback(c.park, std::max(1, pop / 250));
  c.hospital = fallback(c.hospital, std::max(1, pop / 1500));
  c.icu = fallback(c.icu, std::max(1, pop / 1500));
  c.nursing_home = fallback(c.nursing_home, std::max(1, pop / 1000));
  c.workplace = fallback(c.workplace, std::max(2, pop / 25));
  c.transit = fallback(c.transit, std::max(1, pop / 150));
  return c;
}

void SimConfig::validate() const {
  if (world.population < 2) throw ConfigError("world.population", "must be at least 2");
  if (world.n_days < 1) throw ConfigError("world.n_days", "must be at least 1");
  if (world.slot_minutes != kSlotMinutes) {
    throw ConfigError("world.slot_minutes", "fixed at 15 in this build");
  }
  require_unit(world.app_adoption, "world.app_adoption");
  if (world.initial_infected < 0 || world.initial_infected > world.population) {
    throw ConfigError("world.initial_infected", "must lie in [0, population]");
  }
  if (world.zone_count < 1) throw ConfigError("world.zone_count", "must be at least 1");
  require_unit(world.employment_rate, "world.employment_rate");
  require_unit(world.healthcare_worker_rate, "world.healthcare_worker_rate");
  require_unit(world.nursing_home_rate, "world.nursing_home_rate");
  if (world.discretionary_rate < 0.0) {
    throw ConfigError("world.discretionary_rate", "must be non-negative");
  }
  const LocationCounts& lc = world.locations;
  for (int v : {lc.household, lc.store, lc.park, lc.hospital, lc.icu, lc.nursing_home,
                lc.workplace, lc.transit}) {
    if (v < 0) throw ConfigError("world.locations", "counts must be non-negative");
  }

  require_unit(disease.p_asymptomatic, "disease.p_asymptomatic");
  require_unit(disease.asymptomatic_infectiousness, "disease.asymptomatic_infectiousness");
  require_unit(disease.p_really_sick, "disease.p_really_sick");
  require_unit(disease.p_extremely_sick_given_really, "disease.p_extremely_sick_given_really");
  require_unit(disease.p_fatal, "disease.p_fatal");
  for (const auto* g : {&disease.incubation, &disease.ramp, &disease.plateau, &disease.decline}) {
    if (g->mean <= 0.0 || g->sd <= 0.0) {
      throw ConfigError("disease.course", "phase means and sds must be positive");
    }
  }
  require_positive(disease.min_phase_days, "disease.min_phase_days");
  require_positive(disease.base_transmission_rate, "disease.base_transmission_rate");
  require_unit(disease.distance_medium_factor, "disease.distance_medium_factor");
  require_unit(disease.mask_efficacy_healthcare, "disease.mask_efficacy_healthcare");
  require_unit(disease.mask_efficacy_other, "disease.mask_efficacy_other");
  require_unit(disease.baseline_mask_rate, "disease.baseline_mask_rate");
  require_unit(disease.hygiene_transmission_factor, "disease.hygiene_transmission_factor");
  require_unit(disease.cold_flu_weekly_rate, "disease.cold_flu_weekly_rate");
  require_unit(disease.test.false_positive_rate, "disease.test.false_positive_rate");
  require_unit(disease.test.false_negative_rate, "disease.test.false_negative_rate");
  if (disease.test.turnaround_days < 0) {
    throw ConfigError("disease.test.turnaround_days", "must be non-negative");
  }
  for (const auto* row : {&disease.symptoms.ramp, &disease.symptoms.plateau,
                          &disease.symptoms.decline}) {
    for (double p : *row) require_unit(p, "disease.symptoms");
  }

  if (risk.window_days < 1) throw ConfigError("risk.window_days", "must be at least 1");
  require_positive(risk.cluster_distance_threshold, "risk.cluster_distance_threshold");
  require_unit(risk.cold_flu_discount, "risk.cold_flu_discount");

  if (transport.mix_servers < 1) throw ConfigError("transport.mix_servers", "must be at least 1");
  if (transport.batch_threshold < 1) {
    throw ConfigError("transport.batch_threshold", "must be at least 1");
  }
  if (transport.daily_post_quota < 1) {
    throw ConfigError("transport.daily_post_quota", "must be at least 1");
  }
  require_unit(transport.same_day_cutoff, "transport.same_day_cutoff");

  if (scenario.intervention_day < 0) {
    throw ConfigError("scenario.intervention_day", "must be non-negative");
  }
  require_unit(scenario.distancing_strength, "scenario.distancing_strength");
  if (scenario.quarantine_days < 1) {
    throw ConfigError("scenario.quarantine_days", "must be at least 1");
  }
  if (scenario.secondary_quarantine_days < 1) {
    throw ConfigError("scenario.secondary_quarantine_days", "must be at least 1");
  }
  if (scenario.level3_duration_factor <= 0.0 || scenario.level3_duration_factor > 1.0) {
    throw ConfigError("scenario.level3_duration_factor", "must lie in (0, 1]");
  }
  if (scenario.level4_outing_factor <= 0.0 || scenario.level4_outing_factor > 1.0) {
    throw ConfigError("scenario.level4_outing_factor", "must lie in (0, 1]");
  }

  require_unit(aggregation.opt_in_rate, "aggregation.opt_in_rate");
  if (aggregation.retention_days < 1) {
    throw ConfigError("aggregation.retention_days", "must be at least 1");
  }
  if (aggregation.phone_log_retention_days < 1) {
    throw ConfigError("aggregation.phone_log_retention_days", "must be at least 1");
  }
}

SimConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("<document>", "top level must be an object");

  SimConfig cfg;
  try {
    check_keys(j, "", {"world", "disease", "risk", "transport", "scenario", "aggregation"});

    if (auto it = j.find("world"); it != j.end()) {
      const json& w = *it;
      check_keys(w, "world",
                 {"population", "n_days", "slot_minutes", "locations", "app_adoption", "seed",
                  "initial_infected", "zone_count", "small_zone_tail", "employment_rate",
                  "healthcare_worker_rate", "nursing_home_rate", "discretionary_rate", "weekends",
                  "weekend_rate_boost"});
      get_if(w, "population", cfg.world.population);
      get_if(w, "n_days", cfg.world.n_days);
      get_if(w, "slot_minutes", cfg.world.slot_minutes);
      get_if(w, "app_adoption", cfg.world.app_adoption);
      get_if(w, "seed", cfg.world.seed);
      get_if(w, "initial_infected", cfg.world.initial_infected);
      get_if(w, "zone_count", cfg.world.zone_count);
      get_if(w, "small_zone_tail", cfg.world.small_zone_tail);
      get_if(w, "employment_rate", cfg.world.employment_rate);
      get_if(w, "healthcare_worker_rate", cfg.world.healthcare_worker_rate);
      get_if(w, "nursing_home_rate", cfg.world.nursing_home_rate);
      get_if(w, "discretionary_rate", cfg.world.discretionary_rate);
      get_if(w, "weekends", cfg.world.weekends);
      get_if(w, "weekend_rate_boost", cfg.world.weekend_rate_boost);
      if (auto lit = w.find("locations"); lit != w.end()) {
        const json& l = *lit;
        check_keys(l, "world.locations",
                   {"household", "store", "park", "hospital", "icu", "nursing_home", "workplace",
                    "transit"});
        get_if(l, "household", cfg.world.locations.household);
        get_if(l, "store", cfg.world.locations.store);
        get_if(l, "park", cfg.world.locations.park);
        get_if(l, "hospital", cfg.world.locations.hospital);
        get_if(l, "icu", cfg.world.locations.icu);
        get_if(l, "nursing_home", cfg.world.locations.nursing_home);
        get_if(l, "workplace", cfg.world.locations.workplace);
        get_if(l, "transit", cfg.world.locations.transit);
      }
    }

    if (auto it = j.find("disease"); it != j.end()) {
      const json& d = *it;
      check_keys(d, "disease",
                 {"p_asymptomatic", "asymptomatic_infectiousness", "p_really_sick",
                  "p_extremely_sick_given_really", "p_fatal", "incubation", "ramp", "plateau",
                  "decline", "min_phase_days", "plateau_height_young", "plateau_height_old",
                  "plateau_height_jitter", "symptom_onset", "cough_infectiousness_boost",
                  "base_transmission_rate", "duration_factor_cap", "distance_medium_factor",
                  "mask_efficacy_healthcare", "mask_efficacy_other", "baseline_mask_rate",
                  "hygiene_transmission_factor", "environmental_infection",
                  "environmental_coupling", "environmental_decay_slots", "cold_flu_weekly_rate",
                  "test", "symptoms"});
      get_if(d, "p_asymptomatic", cfg.disease.p_asymptomatic);
      get_if(d, "asymptomatic_infectiousness", cfg.disease.asymptomatic_infectiousness);
      get_if(d, "p_really_sick", cfg.disease.p_really_sick);
      get_if(d, "p_extremely_sick_given_really", cfg.disease.p_extremely_sick_given_really);
      get_if(d, "p_fatal", cfg.disease.p_fatal);
      get_gaussian(d, "disease", "incubation", cfg.disease.incubation);
      get_gaussian(d, "disease", "ramp", cfg.disease.ramp);
      get_gaussian(d, "disease", "plateau", cfg.disease.plateau);
      get_gaussian(d, "disease", "decline", cfg.disease.decline);
      get_if(d, "min_phase_days", cfg.disease.min_phase_days);
      get_if(d, "plateau_height_young", cfg.disease.plateau_height_young);
      get_if(d, "plateau_height_old", cfg.disease.plateau_height_old);
      get_if(d, "plateau_height_jitter", cfg.disease.plateau_height_jitter);
      get_gaussian(d, "disease", "symptom_onset", cfg.disease.symptom_onset);
      get_if(d, "cough_infectiousness_boost", cfg.disease.cough_infectiousness_boost);
      get_if(d, "base_transmission_rate", cfg.disease.base_transmission_rate);
      get_if(d, "duration_factor_cap", cfg.disease.duration_factor_cap);
      get_if(d, "distance_medium_factor", cfg.disease.distance_medium_factor);
      get_if(d, "mask_efficacy_healthcare", cfg.disease.mask_efficacy_healthcare);
      get_if(d, "mask_efficacy_other", cfg.disease.mask_efficacy_other);
      get_if(d, "baseline_mask_rate", cfg.disease.baseline_mask_rate);
      get_if(d, "hygiene_transmission_factor", cfg.disease.hygiene_transmission_factor);
      get_if(d, "environmental_infection", cfg.disease.environmental_infection);
      get_if(d, "environmental_coupling", cfg.disease.environmental_coupling);
      get_if(d, "environmental_decay_slots", cfg.disease.environmental_decay_slots);
      get_if(d, "cold_flu_weekly_rate", cfg.disease.cold_flu_weekly_rate);
      if (auto tit = d.find("test"); tit != d.end()) {
        const json& t = *tit;
        check_keys(t, "disease.test",
                   {"false_positive_rate", "false_negative_rate", "turnaround_days",
                    "daily_capacity", "symptomatic_seek_rate", "min_symptoms_to_seek"});
        get_if(t, "false_positive_rate", cfg.disease.test.false_positive_rate);
        get_if(t, "false_negative_rate", cfg.disease.test.false_negative_rate);
        get_if(t, "turnaround_days", cfg.disease.test.turnaround_days);
        get_if(t, "daily_capacity", cfg.disease.test.daily_capacity);
        get_if(t, "symptomatic_seek_rate", cfg.disease.test.symptomatic_seek_rate);
        get_if(t, "min_symptoms_to_seek", cfg.disease.test.min_symptoms_to_seek);
      }
      if (auto sit = d.find("symptoms"); sit != d.end()) {
        const json& s = *sit;
        check_keys(s, "disease.symptoms", {"ramp", "plateau", "decline"});
        if (auto r = s.find("ramp"); r != s.end())
          get_symptom_row(*r, "disease.symptoms.ramp", cfg.disease.symptoms.ramp);
        if (auto r = s.find("plateau"); r != s.end())
          get_symptom_row(*r, "disease.symptoms.plateau", cfg.disease.symptoms.plateau);
        if (auto r = s.find("decline"); r != s.end())
          get_symptom_row(*r, "disease.symptoms.decline", cfg.disease.symptoms.decline);
      }
    }

    if (auto it = j.find("risk"); it != j.end()) {
      const json& r = *it;
      check_keys(r, "risk",
                 {"window_days", "thresholds_file", "cluster_distance_threshold",
                  "cluster_day_gap_penalty", "prior_base", "prior_age", "prior_conditions",
                  "cold_flu_discount", "contact_scale", "contact_evidence_cap",
                  "symptom_evidence_cap", "test_evidence", "contagious_lead_days",
                  "contagious_tail_days"});
      get_if(r, "window_days", cfg.risk.window_days);
      get_if(r, "thresholds_file", cfg.risk.thresholds_file);
      get_if(r, "cluster_distance_threshold", cfg.risk.cluster_distance_threshold);
      get_if(r, "cluster_day_gap_penalty", cfg.risk.cluster_day_gap_penalty);
      get_if(r, "prior_base", cfg.risk.prior_base);
      get_if(r, "prior_age", cfg.risk.prior_age);
      get_if(r, "prior_conditions", cfg.risk.prior_conditions);
      get_if(r, "cold_flu_discount", cfg.risk.cold_flu_discount);
      get_if(r, "contact_scale", cfg.risk.contact_scale);
      get_if(r, "contact_evidence_cap", cfg.risk.contact_evidence_cap);
      get_if(r, "symptom_evidence_cap", cfg.risk.symptom_evidence_cap);
      get_if(r, "test_evidence", cfg.risk.test_evidence);
      get_if(r, "contagious_lead_days", cfg.risk.contagious_lead_days);
      get_if(r, "contagious_tail_days", cfg.risk.contagious_tail_days);
    }

    if (auto it = j.find("transport"); it != j.end()) {
      const json& t = *it;
      check_keys(t, "transport",
                 {"mix_servers", "batch_threshold", "null_crypto", "daily_post_quota",
                  "same_day_cutoff"});
      get_if(t, "mix_servers", cfg.transport.mix_servers);
      get_if(t, "batch_threshold", cfg.transport.batch_threshold);
      get_if(t, "null_crypto", cfg.transport.null_crypto);
      get_if(t, "daily_post_quota", cfg.transport.daily_post_quota);
      get_if(t, "same_day_cutoff", cfg.transport.same_day_cutoff);
    }

    if (auto it = j.find("scenario"); it != j.end()) {
      const json& s = *it;
      check_keys(s, "scenario",
                 {"intervention_day", "distancing_strength", "quarantine_days",
                  "secondary_quarantine_days", "level3_duration_factor", "level4_outing_factor"});
      get_if(s, "intervention_day", cfg.scenario.intervention_day);
      get_if(s, "distancing_strength", cfg.scenario.distancing_strength);
      get_if(s, "quarantine_days", cfg.scenario.quarantine_days);
      get_if(s, "secondary_quarantine_days", cfg.scenario.secondary_quarantine_days);
      get_if(s, "level3_duration_factor", cfg.scenario.level3_duration_factor);
      get_if(s, "level4_outing_factor", cfg.scenario.level4_outing_factor);
    }

    if (auto it = j.find("aggregation"); it != j.end()) {
      const json& a = *it;
      check_keys(a, "aggregation", {"opt_in_rate", "retention_days", "phone_log_retention_days"});
      get_if(a, "opt_in_rate", cfg.aggregation.opt_in_rate);
      get_if(a, "retention_days", cfg.aggregation.retention_days);
      get_if(a, "phone_log_retention_days", cfg.aggregation.phone_log_retention_days);
    }
  } catch (const json::exception& e) {
    throw ConfigError("<document>", std::string("bad value type: ") + e.what());
  }

  cfg.validate();
  return cfg;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const SimConfig& cfg) {
  json j;
  j["world"] = {
      {"population", cfg.world.population},
      {"n_days", cfg.world.n_days},
      {"slot_minutes", cfg.world.slot_minutes},
      {"app_adoption", cfg.world.app_adoption},
      {"seed", cfg.world.seed},
      {"initial_infected", cfg.world.initial_infected},
      {"zone_count", cfg.world.zone_count},
      {"small_zone_tail", cfg.world.small_zone_tail},
      {"employment_rate", cfg.world.employment_rate},
      {"healthcare_worker_rate", cfg.world.healthcare_worker_rate},
      {"nursing_home_rate", cfg.world.nursing_home_rate},
      {"discretionary_rate", cfg.world.discretionary_rate},
      {"weekends", cfg.world.weekends},
      {"weekend_rate_boost", cfg.world.weekend_rate_boost},
      {"locations",
       {{"household", cfg.world.locations.household},
        {"store", cfg.world.locations.store},
        {"park", cfg.world.locations.park},
        {"hospital", cfg.world.locations.hospital},
        {"icu", cfg.world.locations.icu},
        {"nursing_home", cfg.world.locations.nursing_home},
        {"workplace", cfg.world.locations.workplace},
        {"transit", cfg.world.locations.transit}}},
  };
  j["disease"] = {
      {"p_asymptomatic", cfg.disease.p_asymptomatic},
      {"asymptomatic_infectiousness", cfg.disease.asymptomatic_infectiousness},
      {"p_really_sick", cfg.disease.p_really_sick},
      {"p_extremely_sick_given_really", cfg.disease.p_extremely_sick_given_really},
      {"p_fatal", cfg.disease.p_fatal},
      {"incubation", gaussian_json(cfg.disease.incubation)},
      {"ramp", gaussian_json(cfg.disease.ramp)},
      {"plateau", gaussian_json(cfg.disease.plateau)},
      {"decline", gaussian_json(cfg.disease.decline)},
      {"min_phase_days", cfg.disease.min_phase_days},
      {"plateau_height_young", cfg.disease.plateau_height_young},
      {"plateau_height_old", cfg.disease.plateau_height_old},
      {"plateau_height_jitter", cfg.disease.plateau_height_jitter},
      {"symptom_onset", gaussian_json(cfg.disease.symptom_onset)},
      {"cough_infectiousness_boost", cfg.disease.cough_infectiousness_boost},
      {"base_transmission_rate", cfg.disease.base_transmission_rate},
      {"duration_factor_cap", cfg.disease.duration_factor_cap},
      {"distance_medium_factor", cfg.disease.distance_medium_factor},
      {"mask_efficacy_healthcare", cfg.disease.mask_efficacy_healthcare},
      {"mask_efficacy_other", cfg.disease.mask_efficacy_other},
      {"baseline_mask_rate", cfg.disease.baseline_mask_rate},
      {"hygiene_transmission_factor", cfg.disease.hygiene_transmission_factor},
      {"environmental_infection", cfg.disease.environmental_infection},
      {"environmental_coupling", cfg.disease.environmental_coupling},
      {"environmental_decay_slots", cfg.disease.environmental_decay_slots},
      {"cold_flu_weekly_rate", cfg.disease.cold_flu_weekly_rate},
      {"test",
       {{"false_positive_rate", cfg.disease.test.false_positive_rate},
        {"false_negative_rate", cfg.disease.test.false_negative_rate},
        {"turnaround_days", cfg.disease.test.turnaround_days},
        {"daily_capacity", cfg.disease.test.daily_capacity},
        {"symptomatic_seek_rate", cfg.disease.test.symptomatic_seek_rate},
        {"min_symptoms_to_seek", cfg.disease.test.min_symptoms_to_seek}}},
      {"symptoms",
       {{"ramp", cfg.disease.symptoms.ramp},
        {"plateau", cfg.disease.symptoms.plateau},
        {"decline", cfg.disease.symptoms.decline}}},
  };
  j["risk"] = {
      {"window_days", cfg.risk.window_days},
      {"thresholds_file", cfg.risk.thresholds_file},
      {"cluster_distance_threshold", cfg.risk.cluster_distance_threshold},
      {"cluster_day_gap_penalty", cfg.risk.cluster_day_gap_penalty},
      {"prior_base", cfg.risk.prior_base},
      {"prior_age", cfg.risk.prior_age},
      {"prior_conditions", cfg.risk.prior_conditions},
      {"cold_flu_discount", cfg.risk.cold_flu_discount},
      {"contact_scale", cfg.risk.contact_scale},
      {"contact_evidence_cap", cfg.risk.contact_evidence_cap},
      {"symptom_evidence_cap", cfg.risk.symptom_evidence_cap},
      {"test_evidence", cfg.risk.test_evidence},
      {"contagious_lead_days", cfg.risk.contagious_lead_days},
      {"contagious_tail_days", cfg.risk.contagious_tail_days},
  };
  j["transport"] = {
      {"mix_servers", cfg.transport.mix_servers},
      {"batch_threshold", cfg.transport.batch_threshold},
      {"null_crypto", cfg.transport.null_crypto},
      {"daily_post_quota", cfg.transport.daily_post_quota},
      {"same_day_cutoff", cfg.transport.same_day_cutoff},
  };
  j["scenario"] = {
      {"intervention_day", cfg.scenario.intervention_day},
      {"distancing_strength", cfg.scenario.distancing_strength},
      {"quarantine_days", cfg.scenario.quarantine_days},
      {"secondary_quarantine_days", cfg.scenario.secondary_quarantine_days},
      {"level3_duration_factor", cfg.scenario.level3_duration_factor},
      {"level4_outing_factor", cfg.scenario.level4_outing_factor},
  };
  j["aggregation"] = {
      {"opt_in_rate", cfg.aggregation.opt_in_rate},
      {"retention_days", cfg.aggregation.retention_days},
      {"phone_log_retention_days", cfg.aggregation.phone_log_retention_days},
  };
  return j.dump(2);
}

std::string config_digest(const SimConfig& cfg) {
  // Canonical form: nlohmann::json orders keys alphabetically.
  std::string canon = config_to_json(cfg);
  unsigned char out[16];
  crypto_generichash(out, sizeof(out), reinterpret_cast<const unsigned char*>(canon.data()),
                     canon.size(), nullptr, 0);
  static const char* hex = "0123456789abcdef";
  std::string s;
  s.reserve(32);
  for (unsigned char b : out) {
    s.push_back(hex[b >> 4]);
    s.push_back(hex[b & 0xf]);
  }
  return s;
}

const char* to_string(LocationKind k) {
  switch (k) {
    case LocationKind::household: return "household";
    case LocationKind::store: return "store";
    case LocationKind::park: return "park";
    case LocationKind::hospital: return "hospital";
    case LocationKind::icu: return "icu";
    case LocationKind::nursing_home: return "nursing_home";
    case LocationKind::workplace: return "workplace";
    case LocationKind::transit: return "transit";
  }
  return "?";
}

const char* to_string(DistanceBand b) {
  switch (b) {
    case DistanceBand::close: return "close";
    case DistanceBand::medium: return "medium";
    case DistanceBand::far: return "far";
  }
  return "?";
}

const char* to_string(Symptom s) {
  switch (s) {
    case Symptom::fever: return "fever";
    case Symptom::cough: return "cough";
    case Symptom::fatigue: return "fatigue";
    case Symptom::anosmia: return "anosmia";
    case Symptom::aches: return "aches";
    case Symptom::sore_throat: return "sore_throat";
    case Symptom::runny_nose: return "runny_nose";
    case Symptom::shortness_of_breath: return "shortness_of_breath";
    case Symptom::headache: return "headache";
    case Symptom::nausea: return "nausea";
  }
  return "?";
}

LocationKind location_kind_from_string(const std::string& s) {
  for (int i = 0; i < kLocationKinds; ++i) {
    auto k = static_cast<LocationKind>(i);
    if (s == to_string(k)) return k;
  }
  throw ConfigError("location_kind", "unknown kind: " + s);
}

}  // namespace riskmesh
