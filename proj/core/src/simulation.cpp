#include "riskmesh/simulation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <utility>

namespace riskmesh {

const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::unmitigated: return "unmitigated";
    case ScenarioKind::social_distancing: return "social_distancing";
    case ScenarioKind::binary_tracing: return "binary_tracing";
    case ScenarioKind::risk_app: return "risk_app";
  }
  return "unknown";
}

ScenarioKind scenario_kind_from_string(const std::string& s) {
  if (s == "unmitigated") return ScenarioKind::unmitigated;
  if (s == "social_distancing") return ScenarioKind::social_distancing;
  if (s == "binary_tracing") return ScenarioKind::binary_tracing;
  if (s == "risk_app") return ScenarioKind::risk_app;
  throw ConfigError("scenario", "unknown scenario kind '" + s + "'");
}

std::string scenario_label(const ScenarioSpec& spec) {
  if (spec.kind == ScenarioKind::binary_tracing)
    return std::string("binary_tracing_") + std::to_string(spec.tracing_order);
  return to_string(spec.kind);
}

std::vector<TraceTarget> trace_targets(
    const std::vector<std::deque<std::pair<int, AgentId>>>& app_contacts, AgentId positive_case,
    int order, int day, int window_days) {
  std::vector<TraceTarget> out;
  if (positive_case < 0 || static_cast<std::size_t>(positive_case) >= app_contacts.size())
    return out;
  const int oldest = day - window_days + 1;
  std::vector<std::uint8_t> seen(app_contacts.size(), 0);
  seen[static_cast<std::size_t>(positive_case)] = 1;

  std::vector<AgentId> first;
  for (const auto& [d, peer] : app_contacts[static_cast<std::size_t>(positive_case)]) {
    if (d < oldest || d > day) continue;
    if (seen[static_cast<std::size_t>(peer)]) continue;
    seen[static_cast<std::size_t>(peer)] = 1;
    first.push_back(peer);
    out.push_back({peer, 1});
  }
  if (order >= 2) {
    for (AgentId y : first) {
      for (const auto& [d, peer] : app_contacts[static_cast<std::size_t>(y)]) {
        if (d < oldest || d > day) continue;
        if (seen[static_cast<std::size_t>(peer)]) continue;
        seen[static_cast<std::size_t>(peer)] = 1;
        out.push_back({peer, 2});
      }
    }
  }
  return out;
}

namespace {

// Independent derivation streams under the run seed. World building uses
// 0x77; the mix chain derives its own under 0x31337.
constexpr std::uint64_t kStreamItinerary = 0x10;
constexpr std::uint64_t kStreamEncounter = 0x11;
constexpr std::uint64_t kStreamDisease = 0x12;
constexpr std::uint64_t kStreamEnv = 0x13;
constexpr std::uint64_t kStreamLab = 0x14;
constexpr std::uint64_t kStreamColdFlu = 0x15;
constexpr std::uint64_t kStreamMask = 0x16;
constexpr std::uint64_t kStreamRisk = 0x17;
constexpr std::uint64_t kStreamTransport = 0x18;
constexpr std::uint64_t kStreamGeo = 0x19;
constexpr std::uint64_t kStreamCrypto = 0x1a;

int popcount16(SymptomSet s) { return std::popcount(static_cast<unsigned>(s)); }

}  // namespace

struct Simulation::Impl {
  SimConfig cfg;
  ScenarioSpec spec;
  SimOptions opt;
  std::uint64_t seed;
  const World& world;
  int n = 0;
  bool risk_engine_on = false;
  bool apply_app_recs = false;  // risk_app proper, not score-only calibration
  bool tracing_on = false;
  bool case_isolation_on = false;
  bool geo_on = false;
  double scenario_scalar = 0.0;

  Rng rng_itin, rng_disease, rng_env, rng_lab, rng_coldflu, rng_mask, rng_risk, rng_transport,
      rng_geo;

  std::unique_ptr<CryptoProvider> crypto;
  std::unique_ptr<MixChain> chain;
  std::shared_ptr<const Predictor> predictor;
  Quantizer quantizer;
  TestLab lab;

  // Dynamic agent state.
  std::vector<InfectionStatus> status;
  std::vector<double> infected_at;
  std::vector<DiseaseCourse> course;
  std::vector<std::uint8_t> has_course, dead, masked_today, distancing_now;
  std::vector<std::uint8_t> rec_level, prev_rec_level;
  std::vector<PinnedState> pinned;
  std::vector<LocationId> pinned_loc;
  std::vector<int> quarantine_until;
  std::vector<int> coldflu_start, coldflu_until;
  std::vector<SymptomSet> symptoms_today;
  std::vector<std::uint8_t> ever_symptomatic, tested_positive, level4_tested;
  std::vector<std::vector<LocationId>> visited;
  std::vector<int> bed_patients;  // per location

  OccupancyGrid grid;
  std::vector<Encounter> today_enc;
  DayMobilityStats stats;
  std::vector<double> env_deposit;  // location x slot

  std::vector<std::pair<AgentId, int>> course_ends;
  long long total_encounters = 0;
  long prev_cumulative = 0;
  double prev_rt = 0.0;

  // Phone state, indexed by agent id; only app owners' slots are used.
  struct PhoneChannel {
    ChannelSend send;
    ChannelRecv recv;
  };
  struct SendOrder {
    int day = 0;
    int new_level = 0;
    int prior = -1;
  };
  struct Phone {
    PhoneData data;
    std::vector<PhoneChannel> channels;  // 1:1 with data.contacts
    std::vector<AgentId> true_peer;      // ground truth, used for metrics only
    std::vector<ZoneId> contact_zone;    // zone of the venue, for flow packets
    std::array<int, kRiskHorizon> sent_level;
    std::array<int, kRiskHorizon> heat_sent;
    std::array<int, kRiskHorizon> levels{};
    std::vector<SendOrder> pending_sends;
    int today_level = 0;
    int rec = 0;
    std::array<int, 8> visit_counts{};
    bool opted_in = false;
    Pseudonym pseudonym;
  };
  std::vector<Phone> phones;
  std::vector<int> published_level;

  std::vector<std::deque<std::pair<int, AgentId>>> app_contacts;  // binary tracing ground truth

  RetentionStore retention;

  RunResult result;

  Impl(SimConfig cfg_, ScenarioSpec spec_, std::uint64_t seed_, SimOptions opt_, const World& w)
      : cfg(std::move(cfg_)),
        spec(std::move(spec_)),
        opt(opt_),
        seed(seed_),
        world(w),
        n(static_cast<int>(w.agents.size())),
        rng_itin(derive_seed(seed_, {kStreamItinerary})),
        rng_disease(derive_seed(seed_, {kStreamDisease})),
        rng_env(derive_seed(seed_, {kStreamEnv})),
        rng_lab(derive_seed(seed_, {kStreamLab})),
        rng_coldflu(derive_seed(seed_, {kStreamColdFlu})),
        rng_mask(derive_seed(seed_, {kStreamMask})),
        rng_risk(derive_seed(seed_, {kStreamRisk})),
        rng_transport(derive_seed(seed_, {kStreamTransport})),
        rng_geo(derive_seed(seed_, {kStreamGeo})),
        quantizer(cfg.risk.thresholds_file.empty() ? Quantizer::release_default()
                                                   : Quantizer::load(cfg.risk.thresholds_file)),
        lab(cfg.disease.test),
        grid(n, static_cast<int>(w.locations.size())) {
    risk_engine_on = spec.kind == ScenarioKind::risk_app || opt.score_only_risk_engine;
    apply_app_recs = spec.kind == ScenarioKind::risk_app && !opt.score_only_risk_engine;
    tracing_on = spec.kind == ScenarioKind::binary_tracing;
    case_isolation_on = tracing_on || spec.kind == ScenarioKind::risk_app;
    geo_on = risk_engine_on && opt.collect_geo && !opt.score_only_risk_engine;

    if (spec.mobility_scalar >= 0.0)
      scenario_scalar = spec.mobility_scalar;
    else if (spec.kind == ScenarioKind::social_distancing)
      scenario_scalar = cfg.scenario.distancing_strength;

    status.assign(static_cast<std::size_t>(n), InfectionStatus::susceptible);
    infected_at.assign(static_cast<std::size_t>(n), -1.0);
    course.resize(static_cast<std::size_t>(n));
    has_course.assign(static_cast<std::size_t>(n), 0);
    dead.assign(static_cast<std::size_t>(n), 0);
    masked_today.assign(static_cast<std::size_t>(n), 0);
    distancing_now.assign(static_cast<std::size_t>(n), 0);
    rec_level.assign(static_cast<std::size_t>(n), 0);
    prev_rec_level.assign(static_cast<std::size_t>(n), 0);
    pinned.assign(static_cast<std::size_t>(n), PinnedState::free_moving);
    pinned_loc.assign(static_cast<std::size_t>(n), kNoLocation);
    quarantine_until.assign(static_cast<std::size_t>(n), -1);
    coldflu_start.assign(static_cast<std::size_t>(n), -1);
    coldflu_until.assign(static_cast<std::size_t>(n), -1);
    symptoms_today.assign(static_cast<std::size_t>(n), 0);
    ever_symptomatic.assign(static_cast<std::size_t>(n), 0);
    tested_positive.assign(static_cast<std::size_t>(n), 0);
    level4_tested.assign(static_cast<std::size_t>(n), 0);
    visited.resize(static_cast<std::size_t>(n));
    bed_patients.assign(world.locations.size(), 0);
    env_deposit.assign(world.locations.size() * static_cast<std::size_t>(kSlotsPerDay), 0.0);
    published_level.assign(static_cast<std::size_t>(n), 0);

    crypto = make_crypto(cfg.transport.null_crypto, derive_seed(seed, {kStreamCrypto}));
    if (risk_engine_on) {
      chain = std::make_unique<MixChain>(*crypto, cfg.transport.mix_servers,
                                         cfg.transport.batch_threshold,
                                         cfg.transport.daily_post_quota,
                                         derive_seed(seed, {kStreamTransport, 1}));
      predictor = spec.predictor ? spec.predictor
                                 : std::make_shared<HeuristicPredictor>(cfg.risk);
      phones.resize(static_cast<std::size_t>(n));
      for (AgentId a = 0; a < n; ++a) {
        const Agent& ag = world.agents[static_cast<std::size_t>(a)];
        if (!ag.has_app) continue;
        Phone& ph = phones[static_cast<std::size_t>(a)];
        ph.data.statics = {world.age_decile(a), ag.sex, ag.conditions, ag.healthcare_worker};
        ph.sent_level.fill(-1);
        ph.heat_sent.fill(-1);
        ph.opted_in = rng_geo.chance(cfg.aggregation.opt_in_rate);
        ph.pseudonym = make_pseudonym(rng_geo);
      }
    }
    if (tracing_on) app_contacts.resize(static_cast<std::size_t>(n));

    {
      std::vector<long> pops(world.zone_population.begin(), world.zone_population.end());
      result.aggregator = Aggregator(std::move(pops));
    }
    result.kind = spec.kind;
    result.seed = seed;

    // Day-0 exposures.
    for (AgentId a : world.seed_infections) {
      status[static_cast<std::size_t>(a)] = InfectionStatus::exposed;
      infected_at[static_cast<std::size_t>(a)] = 0.0;
      course[static_cast<std::size_t>(a)] = sample_disease_course(
          cfg.disease, world.agents[static_cast<std::size_t>(a)].age,
          world.agents[static_cast<std::size_t>(a)].conditions, rng_disease);
      has_course[static_cast<std::size_t>(a)] = 1;
      InfectionEdge e;
      e.child = a;
      e.day = 0;
      e.seed = true;
      result.tree.add(e);
    }
  }

  bool intervened(int day) const { return day >= cfg.scenario.intervention_day; }

  bool infected_now(AgentId a) const {
    auto s = status[static_cast<std::size_t>(a)];
    return s == InfectionStatus::exposed || s == InfectionStatus::infectious;
  }

  double source_infectiousness(AgentId a, double t_abs) const {
    const auto ai = static_cast<std::size_t>(a);
    if (!has_course[ai] || dead[ai] || status[ai] == InfectionStatus::recovered) return 0.0;
    double t = t_abs - infected_at[ai];
    if (t <= 0.0) return 0.0;
    bool coughing = has_symptom(symptoms_today[ai], Symptom::cough);
    return infectiousness(cfg.disease, course[ai], t, coughing);
  }

  void infect(AgentId child, AgentId parent, LocationId loc, int day, int slot) {
    const auto ci = static_cast<std::size_t>(child);
    status[ci] = InfectionStatus::exposed;
    infected_at[ci] = day + static_cast<double>(slot) / kSlotsPerDay;
    course[ci] = sample_disease_course(cfg.disease, world.agents[ci].age,
                                       world.agents[ci].conditions, rng_disease);
    has_course[ci] = 1;
    InfectionEdge e;
    e.child = child;
    e.parent = parent;
    e.location = loc;
    e.location_kind =
        loc == kNoLocation ? LocationKind::household : world.locations[static_cast<std::size_t>(loc)].kind;
    e.day = day;
    e.seed = false;
    result.tree.add(e);
  }

  void release_bed(AgentId a) {
    const auto ai = static_cast<std::size_t>(a);
    if (pinned[ai] == PinnedState::hospital_bed || pinned[ai] == PinnedState::icu_bed) {
      bed_patients[static_cast<std::size_t>(pinned_loc[ai])] -= 1;
      pinned[ai] = PinnedState::free_moving;
      pinned_loc[ai] = kNoLocation;
    }
  }

  bool admit(AgentId a, LocationKind kind) {
    for (LocationId loc : world.kind_index(kind)) {
      const auto li = static_cast<std::size_t>(loc);
      if (bed_patients[li] < world.locations[li].capacity) {
        release_bed(a);
        bed_patients[li] += 1;
        pinned[static_cast<std::size_t>(a)] =
            kind == LocationKind::icu ? PinnedState::icu_bed : PinnedState::hospital_bed;
        pinned_loc[static_cast<std::size_t>(a)] = loc;
        return true;
      }
    }
    return false;
  }

  // ---- daily phases, in the fixed order ----

  void plan_mobility(int day) {
    for (AgentId a = 0; a < n; ++a) {
      const auto ai = static_cast<std::size_t>(a);
      const Agent& ag = world.agents[ai];
      bool m = rng_mask.chance(cfg.disease.baseline_mask_rate * (0.5 + ag.carefulness));
      if (ag.healthcare_worker || rec_level[ai] >= 2) m = true;
      masked_today[ai] = m ? 1 : 0;
      distancing_now[ai] = rec_level[ai] >= 2 ? 1 : 0;
    }
    MobilityContext ctx;
    ctx.day = day;
    ctx.global_scalar = intervened(day) ? scenario_scalar : 0.0;
    ctx.rec_level = rec_level;
    ctx.pinned = pinned;
    ctx.pinned_loc = pinned_loc;
    ctx.visited = &visited;
    ctx.level3_duration_factor = cfg.scenario.level3_duration_factor;
    ctx.level4_outing_factor = cfg.scenario.level4_outing_factor;
    grid.reset();
    build_itineraries(world, ctx, grid, rng_itin, &stats);
  }

  void detect_contacts(int day) {
    std::uint64_t band_seed = derive_seed(seed, {kStreamEncounter, static_cast<std::uint64_t>(day)});
    today_enc = detect_encounters(grid, world, day, distancing_now, band_seed);
    total_encounters += static_cast<long long>(today_enc.size());
    if (opt.collect_encounters) result.encounters_by_day.push_back(today_enc);

    if (tracing_on) {
      const int oldest = day - cfg.risk.window_days;
      for (const Encounter& e : today_enc) {
        if (e.band == DistanceBand::far) continue;  // out of radio range
        if (!world.agents[static_cast<std::size_t>(e.a)].has_app ||
            !world.agents[static_cast<std::size_t>(e.b)].has_app)
          continue;
        app_contacts[static_cast<std::size_t>(e.a)].push_back({day, e.b});
        app_contacts[static_cast<std::size_t>(e.b)].push_back({day, e.a});
      }
      for (auto& dq : app_contacts)
        while (!dq.empty() && dq.front().first < oldest) dq.pop_front();
    }
  }

  void spread_infection(int day) {
    for (const Encounter& e : today_enc) {
      double t_abs = day + static_cast<double>(e.start_slot) / kSlotsPerDay;
      double inf_a = source_infectiousness(e.a, t_abs);
      double inf_b = source_infectiousness(e.b, t_abs);
      AgentId src = kNoAgent, dst = kNoAgent;
      double inf = 0.0;
      if (inf_a > 0.0 && status[static_cast<std::size_t>(e.b)] == InfectionStatus::susceptible) {
        src = e.a;
        dst = e.b;
        inf = inf_a;
      } else if (inf_b > 0.0 &&
                 status[static_cast<std::size_t>(e.a)] == InfectionStatus::susceptible) {
        src = e.b;
        dst = e.a;
        inf = inf_b;
      } else {
        continue;
      }
      const LocationKind kind = world.locations[static_cast<std::size_t>(e.location)].kind;
      EncounterExposure x;
      x.source_infectiousness = inf;
      x.duration_min = e.duration_min;
      x.band = e.band;
      x.source_masked = masked_today[static_cast<std::size_t>(src)] != 0 &&
                        kind != LocationKind::household;
      x.source_healthcare_mask = world.agents[static_cast<std::size_t>(src)].healthcare_worker;
      x.recipient_hygiene = rec_level[static_cast<std::size_t>(dst)] >= 1;
      double p = transmission_probability(cfg.disease, x);
      if (p > 0.0 && rng_disease.chance(p)) infect(dst, src, e.location, day, e.start_slot);
    }

    if (cfg.disease.environmental_infection) {
      std::fill(env_deposit.begin(), env_deposit.end(), 0.0);
      for (AgentId a = 0; a < n; ++a) {
        const auto ai = static_cast<std::size_t>(a);
        if (!has_course[ai] || dead[ai] || status[ai] == InfectionStatus::recovered) continue;
        if (infected_at[ai] >= day) continue;  // infected earlier today: sheds from tomorrow
        for (int s = kFirstWakingSlot; s < kSlotsPerDay; ++s) {
          LocationId loc = grid.at(a, s);
          if (loc == kNoLocation) continue;
          double inf = source_infectiousness(a, day + static_cast<double>(s) / kSlotsPerDay);
          if (inf > 0.0)
            env_deposit[static_cast<std::size_t>(loc) * kSlotsPerDay + static_cast<std::size_t>(s)] +=
                inf;
        }
      }
      const double coupled = cfg.disease.base_transmission_rate * cfg.disease.environmental_coupling;
      for (AgentId a = 0; a < n; ++a) {
        if (status[static_cast<std::size_t>(a)] != InfectionStatus::susceptible) continue;
        for (int s = kFirstWakingSlot + 1; s < kSlotsPerDay; ++s) {
          LocationId loc = grid.at(a, s);
          if (loc == kNoLocation) continue;
          double hazard = 0.0;
          int lo = std::max(kFirstWakingSlot, s - cfg.disease.environmental_decay_slots);
          for (int sp = lo; sp < s; ++sp)
            hazard += env_deposit[static_cast<std::size_t>(loc) * kSlotsPerDay +
                                  static_cast<std::size_t>(sp)];
          if (hazard <= 0.0) continue;
          double p = std::min(0.95, coupled * hazard);
          if (rng_env.chance(p)) {
            infect(a, kNoAgent, loc, day, s);
            break;
          }
        }
      }
    }
  }

  void medical_phase(int day) {
    // Disease progression at end of day.
    for (AgentId a = 0; a < n; ++a) {
      const auto ai = static_cast<std::size_t>(a);
      if (!has_course[ai] || status[ai] == InfectionStatus::recovered) continue;
      double t = (day + 1.0) - infected_at[ai];
      const ViralLoadCurve& c = course[ai].curve;
      if (status[ai] == InfectionStatus::exposed && t >= c.incubation_days)
        status[ai] = InfectionStatus::infectious;
      if (course[ai].fatal && t >= c.plateau_end()) {
        release_bed(a);
        dead[ai] = 1;
        pinned[ai] = PinnedState::absent;
        status[ai] = InfectionStatus::recovered;
        course_ends.push_back({a, day});
      } else if (t >= c.end()) {
        release_bed(a);
        status[ai] = InfectionStatus::recovered;
        course_ends.push_back({a, day});
      }
    }

    // Background colds arrive weekly.
    if (day % 7 == 0) {
      std::vector<int> ages(static_cast<std::size_t>(n));
      for (AgentId a = 0; a < n; ++a) ages[static_cast<std::size_t>(a)] = world.agents[static_cast<std::size_t>(a)].age;
      for (const ColdFluEpisode& ep : sample_background_illness(cfg.disease, ages, day, rng_coldflu)) {
        coldflu_start[static_cast<std::size_t>(ep.agent)] = ep.start_day;
        coldflu_until[static_cast<std::size_t>(ep.agent)] = ep.start_day + ep.duration_days;
      }
    }

    // Today's observable symptoms.
    for (AgentId a = 0; a < n; ++a) {
      const auto ai = static_cast<std::size_t>(a);
      SymptomSet s = 0;
      if (has_course[ai] && !dead[ai] && status[ai] != InfectionStatus::recovered) {
        double t = (day + 0.5) - infected_at[ai];
        if (t > 0.0) s |= sample_symptoms(cfg.disease, course[ai], t, rng_disease);
      }
      if (coldflu_start[ai] >= 0 && day >= coldflu_start[ai] && day < coldflu_until[ai])
        s |= sample_cold_flu_symptoms(rng_coldflu);
      symptoms_today[ai] = s;
      if (s != 0) ever_symptomatic[ai] = 1;
    }

    // Hospital and ICU flow; beds are claimed in agent order while capacity
    // lasts, everyone else waits at home and retries tomorrow.
    for (AgentId a = 0; a < n; ++a) {
      const auto ai = static_cast<std::size_t>(a);
      if (!has_course[ai] || dead[ai]) continue;
      if (status[ai] == InfectionStatus::recovered) continue;
      double t = (day + 1.0) - infected_at[ai];
      CourseStage stage = course_stage(course[ai].curve, t);
      bool in_care = pinned[ai] == PinnedState::hospital_bed || pinned[ai] == PinnedState::icu_bed;
      if (stage == CourseStage::plateau && course[ai].really_sick) {
        if (course[ai].extremely_sick && pinned[ai] != PinnedState::icu_bed) {
          if (!admit(a, LocationKind::icu) && !in_care) admit(a, LocationKind::hospital);
        } else if (!course[ai].extremely_sick && !in_care) {
          admit(a, LocationKind::hospital);
        }
      } else if (in_care && stage != CourseStage::plateau) {
        release_bed(a);
      }
    }

    // Lab returns, then new swabs.
    for (const TestResult& r : lab.collect(day)) {
      const auto ai = static_cast<std::size_t>(r.agent);
      if (r.positive) tested_positive[ai] = 1;
      if (risk_engine_on && world.agents[ai].has_app)
        phones[ai].data.test_results.push_back({r.requested_day, day, r.positive});
      if (r.positive && case_isolation_on && intervened(day)) {
        quarantine_until[ai] =
            std::max(quarantine_until[ai], day + cfg.scenario.quarantine_days);
        if (tracing_on) {
          for (const TraceTarget& t : trace_targets(app_contacts, r.agent, spec.tracing_order, day,
                                                    cfg.risk.window_days)) {
            const auto ti = static_cast<std::size_t>(t.agent);
            int span = t.order == 1 ? cfg.scenario.quarantine_days
                                    : cfg.scenario.secondary_quarantine_days;
            quarantine_until[ti] = std::max(quarantine_until[ti], day + span);
            if (t.order == 1 && !tested_positive[ti] && !lab.pending(t.agent))
              lab.request(t.agent, day, infected_now(t.agent), rng_lab);
          }
        }
      }
    }
    for (AgentId a = 0; a < n; ++a) {
      const auto ai = static_cast<std::size_t>(a);
      if (dead[ai] || tested_positive[ai]) continue;
      if (popcount16(symptoms_today[ai]) < cfg.disease.test.min_symptoms_to_seek) continue;
      if (lab.pending(a)) continue;
      if (rng_lab.chance(cfg.disease.test.symptomatic_seek_rate))
        lab.request(a, day, infected_now(a), rng_lab);
    }
  }

  void risk_phase(int day) {
    // Window bookkeeping: index i covers absolute day (day - 14 + i).
    for (AgentId a = 0; a < n; ++a) {
      if (!world.agents[static_cast<std::size_t>(a)].has_app) continue;
      Phone& ph = phones[static_cast<std::size_t>(a)];
      if (day > 0) {
        for (int i = 0; i + 1 < kRiskHorizon; ++i) {
          ph.sent_level[static_cast<std::size_t>(i)] = ph.sent_level[static_cast<std::size_t>(i) + 1];
          ph.heat_sent[static_cast<std::size_t>(i)] = ph.heat_sent[static_cast<std::size_t>(i) + 1];
        }
        ph.sent_level[kRiskHorizon - 1] = -1;
        ph.heat_sent[kRiskHorizon - 1] = -1;
      }
    }

    // Log today's proximity events: handshake, in-band level exchange, and
    // (when enabled) a flow packet about the venue.
    for (const Encounter& e : today_enc) {
      if (e.band == DistanceBand::far) continue;
      const Agent& aa = world.agents[static_cast<std::size_t>(e.a)];
      const Agent& ab = world.agents[static_cast<std::size_t>(e.b)];
      if (!aa.has_app || !ab.has_app) continue;
      KeyPair kp_a = crypto->generate_keypair();
      KeyPair kp_b = crypto->generate_keypair();
      auto ch_a = make_channel(*crypto, kp_a, kp_b.pk);
      auto ch_b = make_channel(*crypto, kp_b, kp_a.pk);
      if (!ch_a || !ch_b) continue;
      log_contact(e.a, e.b, e, *ch_a, day);
      log_contact(e.b, e.a, e, *ch_b, day);
    }

    // Pull what the mixnet delivered since yesterday's round.
    for (AgentId a = 0; a < n; ++a) {
      if (!world.agents[static_cast<std::size_t>(a)].has_app) continue;
      Phone& ph = phones[static_cast<std::size_t>(a)];
      for (std::size_t i = 0; i < ph.channels.size(); ++i) {
        for (Bytes& ct : chain->mailbox().fetch(ph.channels[i].recv.mailbox.address)) {
          auto u = open_update(*crypto, ph.channels[i].recv, ct);
          if (!u) {
            result.transport.replays_rejected += 1;
            continue;
          }
          ContactLogEntry& entry = ph.data.contacts[i];
          if (geo_on && ph.opted_in && entry.received_level != u->new_level) {
            FlowMapPacket fp;
            fp.home_zone = world.agents[static_cast<std::size_t>(a)].home_zone;
            fp.contact_zone = ph.contact_zone[i];
            fp.day = entry.day;
            fp.received_level = u->new_level;
            fp.old_received_level = entry.received_level;
            result.aggregator.ingest(fp);
          }
          entry.prior_level = entry.received_level;
          entry.received_level = u->new_level;
          entry.arrival_day = day;
          entry.level_history.push_back(static_cast<std::uint8_t>(u->new_level));
          result.transport.updates_applied += 1;
        }
      }

      // Forget observations that fell out of the window, keeping the
      // channel table aligned with the contact log.
      ph.data.day_cursor = day;
      const int oldest = day - cfg.risk.window_days;
      std::size_t keep = 0;
      while (keep < ph.data.contacts.size() && ph.data.contacts[keep].day < oldest) ++keep;
      if (keep > 0) {
        ph.data.contacts.erase(ph.data.contacts.begin(),
                               ph.data.contacts.begin() + static_cast<std::ptrdiff_t>(keep));
        ph.channels.erase(ph.channels.begin(), ph.channels.begin() + static_cast<std::ptrdiff_t>(keep));
        ph.true_peer.erase(ph.true_peer.begin(), ph.true_peer.begin() + static_cast<std::ptrdiff_t>(keep));
        ph.contact_zone.erase(ph.contact_zone.begin(),
                              ph.contact_zone.begin() + static_cast<std::ptrdiff_t>(keep));
      }
      if (symptoms_today[static_cast<std::size_t>(a)] != 0)
        ph.data.record_symptoms(day, symptoms_today[static_cast<std::size_t>(a)]);
      ph.data.purge(cfg.risk.window_days);

      cluster_contacts(ph.data.contacts, cfg.risk);
      auto scores = predictor->estimate(ph.data);
      result.calibration_scores.push_back(scores[kRiskHorizon - 1]);
      for (int i = 0; i < kRiskHorizon; ++i)
        ph.levels[static_cast<std::size_t>(i)] = quantizer.level(scores[static_cast<std::size_t>(i)]);
      ph.today_level = ph.levels[kRiskHorizon - 1];
      ph.rec = recommendation_level(ph.today_level);

      // Queue updates for days whose quantized level moved.
      ph.pending_sends.clear();
      for (int i = 0; i < kRiskHorizon; ++i) {
        int d = day - (kRiskHorizon - 1) + i;
        if (d < 0) continue;
        int prev = ph.sent_level[static_cast<std::size_t>(i)];
        int cur = ph.levels[static_cast<std::size_t>(i)];
        if (prev == cur) continue;
        ph.pending_sends.push_back({d, cur, prev});
        ph.sent_level[static_cast<std::size_t>(i)] = cur;
      }

      if (geo_on && ph.opted_in) track_visits(a);
    }
  }

  void log_contact(AgentId owner, AgentId peer, const Encounter& e, const Channel& ch, int day) {
    Phone& ph = phones[static_cast<std::size_t>(owner)];
    ContactLogEntry entry;
    entry.day = day;
    entry.duration_min = e.duration_min;
    entry.band = e.band;
    entry.received_level = published_level[static_cast<std::size_t>(peer)];
    entry.arrival_day = day;
    entry.level_history.push_back(static_cast<std::uint8_t>(entry.received_level));
    ph.data.contacts.push_back(std::move(entry));
    ph.channels.push_back({ch.send, ch.recv});
    ph.true_peer.push_back(peer);
    ZoneId venue = world.locations[static_cast<std::size_t>(e.location)].zone;
    ph.contact_zone.push_back(venue);
    // Peers already know my current published level from the handshake.
    if (ph.sent_level[kRiskHorizon - 1] < 0)
      ph.sent_level[kRiskHorizon - 1] = published_level[static_cast<std::size_t>(owner)];
    if (geo_on && ph.opted_in) {
      FlowMapPacket fp;
      fp.home_zone = world.agents[static_cast<std::size_t>(owner)].home_zone;
      fp.contact_zone = venue;
      fp.day = day;
      fp.received_level = published_level[static_cast<std::size_t>(peer)];
      result.aggregator.ingest(fp);
    }
  }

  void track_visits(AgentId a) {
    Phone& ph = phones[static_cast<std::size_t>(a)];
    std::array<bool, 8> seen{};
    for (int s = kFirstWakingSlot; s < kSlotsPerDay; ++s) {
      LocationId loc = grid.at(a, s);
      if (loc == kNoLocation) continue;
      seen[static_cast<std::size_t>(world.locations[static_cast<std::size_t>(loc)].kind)] = true;
    }
    for (std::size_t k = 0; k < seen.size(); ++k)
      if (seen[k]) ph.visit_counts[k] += 1;
  }

  void message_phase(int day) {
    auto server_pks = chain->server_pks();
    for (AgentId a = 0; a < n; ++a) {
      if (!world.agents[static_cast<std::size_t>(a)].has_app) continue;
      Phone& ph = phones[static_cast<std::size_t>(a)];
      for (const SendOrder& so : ph.pending_sends) {
        for (std::size_t i = 0; i < ph.data.contacts.size(); ++i) {
          if (ph.data.contacts[i].day != so.day) continue;
          RiskUpdate u;
          u.day = so.day;
          u.new_level = so.new_level;
          u.prior_level = so.prior;
          Bytes ct = seal_update(*crypto, ph.channels[i].send, u);
          Bytes record = encode_deposit(ph.channels[i].send.mailbox.address, ct);
          Bytes envelope = build_envelope(*crypto, server_pks, record);
          chain->submit(std::move(envelope), static_cast<NetId>(a),
                        day + sample_send_delay(rng_transport));
          result.transport.updates_sent += 1;
        }
      }
      ph.pending_sends.clear();

      if (geo_on && ph.opted_in) {
        HeatMapPacket hp;
        hp.zone = world.agents[static_cast<std::size_t>(a)].home_zone;
        hp.day = day;
        hp.level = ph.today_level;
        hp.mobility = mobility_nibble(stats.outings[static_cast<std::size_t>(a)],
                                      rec_level[static_cast<std::size_t>(a)] >= 1);
        result.aggregator.ingest(hp);
        for (int i = 0; i + 1 < kRiskHorizon; ++i) {
          int prev = ph.heat_sent[static_cast<std::size_t>(i)];
          int cur = ph.levels[static_cast<std::size_t>(i)];
          if (prev >= 0 && prev != cur) {
            HeatMapPacket corr;
            corr.zone = hp.zone;
            corr.day = day - (kRiskHorizon - 1) + i;
            corr.level = cur;
            corr.old_level = prev;
            result.aggregator.ingest(corr);
          }
        }
        for (int i = 0; i < kRiskHorizon; ++i)
          ph.heat_sent[static_cast<std::size_t>(i)] = ph.levels[static_cast<std::size_t>(i)];

        if (day % 7 == a % 7) retention.add(build_research_record(a, day));
      }
    }
    if (geo_on) retention.expire(day);

    chain->advance(day + cfg.transport.same_day_cutoff);
    chain->close_epoch();
    if (day >= 2) chain->mailbox().sweep_older_than(day - 2);
  }

  PseudonymizedRecord build_research_record(AgentId a, int day) const {
    const Phone& ph = phones[static_cast<std::size_t>(a)];
    PseudonymizedRecord rec;
    rec.pseudonym = ph.pseudonym;
    rec.age_band = ph.data.statics.age_band;
    rec.sex = ph.data.statics.sex;
    rec.conditions = ph.data.statics.conditions;
    rec.symptoms_by_day = ph.data.symptoms_by_day;
    rec.diagnosis = DiagnosisStatus::unknown;
    for (const PhoneTestRecord& tr : ph.data.test_results) {
      if (tr.positive) {
        rec.diagnosis = DiagnosisStatus::positive;
        break;
      }
      rec.diagnosis = DiagnosisStatus::negative;
    }
    for (const ContactLogEntry& entry : ph.data.contacts) {
      rec.contacts.count += 1;
      rec.contacts.total_minutes += entry.duration_min;
      if (entry.received_level >= 0 && entry.received_level < kRiskLevels)
        rec.contacts.level_histogram[static_cast<std::size_t>(entry.received_level)] += 1;
    }
    rec.location_visits = ph.visit_counts;
    rec.received_day = day;
    return rec;
  }

  void awareness_phase(int day) {
    const int next = day + 1;
    const bool active = next >= cfg.scenario.intervention_day;
    std::swap(prev_rec_level, rec_level);
    for (AgentId a = 0; a < n; ++a) {
      const auto ai = static_cast<std::size_t>(a);
      int rec = 0;
      if (active && !dead[ai]) {
        if (opt.forced_recommendation > 0) {
          rec = opt.forced_recommendation;
        } else {
          if (apply_app_recs && world.agents[ai].has_app) rec = phones[ai].rec;
          if (quarantine_until[ai] >= next) rec = 4;
        }
      }
      rec_level[ai] = static_cast<std::uint8_t>(rec);

      if (apply_app_recs && world.agents[ai].has_app) {
        if (rec == 4 && prev_rec_level[ai] < 4) {
          if (!level4_tested[ai] && !tested_positive[ai] && !lab.pending(a)) {
            lab.request(a, day, infected_now(a), rng_lab);
            level4_tested[ai] = 1;
          }
        } else if (rec < 4) {
          level4_tested[ai] = 0;
        }
      }
      if (risk_engine_on && world.agents[ai].has_app)
        published_level[ai] = phones[ai].today_level;
    }
  }

  void record_metrics(int day) {
    DailyMetrics m;
    m.day = day;
    m.cumulative_cases = result.tree.node_count();
    m.new_infections = m.cumulative_cases - prev_cumulative;
    prev_cumulative = m.cumulative_cases;
    auto rt = estimate_rt(result.tree, course_ends, day, 7);
    if (rt) {
      m.rt_estimate = *rt;
      m.rt_carried = false;
      prev_rt = *rt;
    } else {
      m.rt_estimate = prev_rt;
      m.rt_carried = true;
    }
    m.mean_contacts_per_agent = 2.0 * static_cast<double>(today_enc.size()) / n;
    long hosp = 0, icu = 0, infectious = 0, quarantined = 0;
    long s_count = 0, e_count = 0, i_count = 0, r_count = 0;
    for (AgentId a = 0; a < n; ++a) {
      const auto ai = static_cast<std::size_t>(a);
      if (pinned[ai] == PinnedState::hospital_bed) ++hosp;
      if (pinned[ai] == PinnedState::icu_bed) ++icu;
      // rec_level already holds tomorrow's advice; today's sits in prev_rec_level.
      if (prev_rec_level[ai] == 4) ++quarantined;
      switch (status[ai]) {
        case InfectionStatus::susceptible: ++s_count; break;
        case InfectionStatus::exposed: ++e_count; break;
        case InfectionStatus::infectious: ++i_count; ++infectious; break;
        case InfectionStatus::recovered: ++r_count; break;
      }
    }
    if (s_count + e_count + i_count + r_count != n)
      throw std::logic_error("population leak: SEIR classes do not sum to the population");
    m.hospitalized = hosp;
    m.icu = icu;
    m.tests_performed = lab.performed_on(day);
    m.quarantined_agent_days = quarantined;
    result.daily.push_back(m);
    result.infectious_by_day.push_back(infectious);
  }

  void finalize() {
    // Cohort attribution: infections per closed case, split by venue kind.
    ValidationReport& v = result.validation;
    v.closed_cases = static_cast<long>(course_ends.size());
    if (v.closed_cases > 0) {
      std::unordered_map<AgentId, int> closed;
      closed.reserve(course_ends.size());
      for (const auto& [a, d] : course_ends) closed.emplace(a, d);
      long total_children = 0;
      std::array<long, 8> by_kind{};
      for (const InfectionEdge& e : result.tree.edges()) {
        if (e.parent == kNoAgent) continue;
        if (!closed.count(e.parent)) continue;
        by_kind[static_cast<std::size_t>(e.location_kind)] += 1;
        total_children += 1;
      }
      v.overall_r = static_cast<double>(total_children) / static_cast<double>(v.closed_cases);
      for (std::size_t k = 0; k < by_kind.size(); ++k)
        v.r_by_location_kind[k] =
            static_cast<double>(by_kind[k]) / static_cast<double>(v.closed_cases);
    }
    long transmitted = 0;
    for (const InfectionEdge& e : result.tree.edges())
      if (e.parent != kNoAgent) ++transmitted;
    v.encounter_transmission_rate =
        total_encounters > 0 ? static_cast<double>(transmitted) / static_cast<double>(total_encounters)
                             : 0.0;
    long symptomatic = 0, positive = 0;
    std::array<long, 10> sym_by_age{}, infected_by_age{};
    for (AgentId a = 0; a < n; ++a) {
      const auto ai = static_cast<std::size_t>(a);
      if (ever_symptomatic[ai]) ++symptomatic;
      if (tested_positive[ai]) ++positive;
      if (has_course[ai]) {
        int band = world.age_decile(a);
        infected_by_age[static_cast<std::size_t>(band)] += 1;
        if (ever_symptomatic[ai]) sym_by_age[static_cast<std::size_t>(band)] += 1;
      }
    }
    v.secondary_attack_rate =
        symptomatic > 0 ? static_cast<double>(positive) / static_cast<double>(symptomatic) : 0.0;
    for (std::size_t k = 0; k < 10; ++k)
      v.symptomatic_fraction_by_age[k] =
          infected_by_age[k] > 0
              ? static_cast<double>(sym_by_age[k]) / static_cast<double>(infected_by_age[k])
              : 0.0;
    std::vector<double> inf_curve(result.infectious_by_day.begin(), result.infectious_by_day.end());
    v.infectious_curve_unimodal = is_unimodal(inf_curve, 3);

    if (risk_engine_on) {
      // Cluster purity over the final window, against true sender identity.
      long agree = 0, total = 0;
      for (AgentId a = 0; a < n; ++a) {
        if (!world.agents[static_cast<std::size_t>(a)].has_app) continue;
        const Phone& ph = phones[static_cast<std::size_t>(a)];
        if (ph.data.contacts.empty()) continue;
        std::unordered_map<int, std::unordered_map<AgentId, int>> tally;
        for (std::size_t i = 0; i < ph.data.contacts.size(); ++i)
          tally[ph.data.contacts[i].cluster][ph.true_peer[i]] += 1;
        for (const auto& [cl, members] : tally) {
          int best = 0;
          long sz = 0;
          for (const auto& [peer, cnt] : members) {
            best = std::max(best, cnt);
            sz += cnt;
          }
          agree += best;
          total += sz;
        }
      }
      v.cluster_purity = total > 0 ? static_cast<double>(agree) / static_cast<double>(total) : -1.0;
      for (const MixServer& srv : chain->servers())
        result.transport.mix_padding += srv.stats().padding;
      result.transport.entry_throttled = chain->entry_throttled();
    }

    int from = std::min(cfg.scenario.intervention_day, cfg.world.n_days);
    double contacts = 0.0, rt_sum = 0.0;
    int days = 0, rt_days = 0;
    for (const DailyMetrics& m : result.daily) {
      if (m.day < from) continue;
      contacts += m.mean_contacts_per_agent;
      ++days;
      if (!m.rt_carried) {
        rt_sum += m.rt_estimate;
        ++rt_days;
      }
    }
    result.post_intervention_mean_contacts = days > 0 ? contacts / days : 0.0;
    result.post_intervention_mean_rt = rt_days > 0 ? rt_sum / rt_days : 0.0;
    result.final_cumulative_cases =
        result.daily.empty() ? 0 : result.daily.back().cumulative_cases;
  }

  void step(int day) {
    plan_mobility(day);
    detect_contacts(day);
    spread_infection(day);
    medical_phase(day);
    if (risk_engine_on) {
      risk_phase(day);
      message_phase(day);
    }
    awareness_phase(day);
    record_metrics(day);
  }

  void run() {
    for (int day = 0; day < cfg.world.n_days; ++day) step(day);
    finalize();
  }
};

Simulation::Simulation(const SimConfig& cfg_in, ScenarioSpec spec, std::uint64_t seed,
                       SimOptions opt) {
  SimConfig cfg = cfg_in;
  cfg.world.seed = seed;
  cfg.validate();
  world_ = build_world(cfg);
  impl_ = std::make_unique<Impl>(std::move(cfg), std::move(spec), seed, opt, world_);
}

Simulation::~Simulation() = default;

void Simulation::run() { impl_->run(); }

RunResult Simulation::take_result() { return std::move(impl_->result); }

RunResult run_scenario(const SimConfig& cfg, ScenarioSpec spec, std::uint64_t seed,
                       SimOptions opt) {
  Simulation sim(cfg, std::move(spec), seed, opt);
  sim.run();
  return sim.take_result();
}

}  // namespace riskmesh
