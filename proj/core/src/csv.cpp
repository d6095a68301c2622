#include "riskmesh/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace riskmesh {

using nlohmann::json;

namespace {

constexpr const char* kCodeVersion = "0.1.0";

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: no platform newline games
  if (!out) throw std::ios_base::failure("cannot write " + path);
  return out;
}

std::string zone_name(ZoneId z) {
  return z == kLumpedZone ? "lumped" : std::to_string(z);
}

}  // namespace

std::string format_number(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void write_metrics_csv(const std::string& path, const std::vector<DailyMetrics>& daily) {
  auto out = open_out(path);
  out << "day,new_infections,cumulative_cases,rt,rt_carried,mean_contacts_per_agent,"
         "hospitalized,icu,tests_performed,quarantined_agent_days\n";
  for (const DailyMetrics& m : daily) {
    out << m.day << ',' << m.new_infections << ',' << m.cumulative_cases << ','
        << format_number(m.rt_estimate) << ',' << (m.rt_carried ? 1 : 0) << ','
        << format_number(m.mean_contacts_per_agent) << ',' << m.hospitalized << ',' << m.icu
        << ',' << m.tests_performed << ',' << m.quarantined_agent_days << '\n';
  }
}

void write_tree_csv(const std::string& path, const InfectionTree& tree) {
  auto out = open_out(path);
  out << "child,parent,day,location_kind\n";
  for (const InfectionEdge& e : tree.edges()) {
    out << e.child << ',' << e.parent << ',' << e.day << ','
        << (e.seed ? "seed" : to_string(e.location_kind)) << '\n';
  }
}

void write_validation_json(const std::string& path, const RunResult& run) {
  const ValidationReport& v = run.validation;
  json r_by_kind = json::object();
  for (int k = 0; k < kLocationKinds; ++k) {
    r_by_kind[to_string(static_cast<LocationKind>(k))] =
        v.r_by_location_kind[static_cast<std::size_t>(k)];
  }
  json j{
      {"scenario", to_string(run.kind)},
      {"seed", run.seed},
      {"final_cumulative_cases", run.final_cumulative_cases},
      {"closed_cases", v.closed_cases},
      {"overall_r", v.overall_r},
      {"r_by_location_kind", r_by_kind},
      {"encounter_transmission_rate", v.encounter_transmission_rate},
      {"secondary_attack_rate", v.secondary_attack_rate},
      {"symptomatic_fraction_by_age", v.symptomatic_fraction_by_age},
      {"infectious_curve_unimodal", v.infectious_curve_unimodal},
      {"post_intervention_mean_contacts", run.post_intervention_mean_contacts},
      {"post_intervention_mean_rt", run.post_intervention_mean_rt},
      {"transport",
       {{"updates_sent", run.transport.updates_sent},
        {"updates_applied", run.transport.updates_applied},
        {"replays_rejected", run.transport.replays_rejected},
        {"entry_throttled", run.transport.entry_throttled},
        {"mix_padding", run.transport.mix_padding}}},
  };
  if (v.cluster_purity >= 0.0)
    j["cluster_purity"] = v.cluster_purity;
  else
    j["cluster_purity"] = nullptr;
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

void write_heat_csv(const std::string& path, const Aggregator& agg, int n_days) {
  auto out = open_out(path);
  out << "zone,day,count";
  for (int l = 0; l < kRiskLevels; ++l) out << ",l" << l;
  for (int m = 0; m < kRiskLevels; ++m) out << ",m" << m;
  out << '\n';
  for (int day = 0; day < n_days; ++day) {
    for (const HeatRow& row : agg.emit_heatmap(day).rows) {
      out << zone_name(row.zone) << ',' << row.day << ',' << row.cell.count;
      for (long l : row.cell.levels) out << ',' << l;
      for (long m : row.cell.mobility) out << ',' << m;
      out << '\n';
    }
  }
}

void write_flow_csv(const std::string& path, const Aggregator& agg, int n_days) {
  auto out = open_out(path);
  out << "home_zone,contact_zone,day,count";
  for (int l = 0; l < kRiskLevels; ++l) out << ",l" << l;
  out << '\n';
  for (int day = 0; day < n_days; ++day) {
    for (const FlowRow& row : agg.emit_flowmap(day).rows) {
      out << zone_name(row.home_zone) << ',' << zone_name(row.contact_zone) << ',' << row.day
          << ',' << row.cell.count;
      for (long l : row.cell.levels) out << ',' << l;
      out << '\n';
    }
  }
}

void write_encounters_csv(const std::string& path,
                          const std::vector<std::vector<Encounter>>& by_day,
                          const World& world) {
  auto out = open_out(path);
  out << "day,agent_a,agent_b,start_slot,duration_min,distance_band,location_kind\n";
  for (const auto& day : by_day) {
    for (const Encounter& e : day) {
      const LocationKind kind = world.locations[static_cast<std::size_t>(e.location)].kind;
      out << e.day << ',' << e.a << ',' << e.b << ',' << e.start_slot << ',' << e.duration_min
          << ',' << to_string(e.band) << ',' << to_string(kind) << '\n';
    }
  }
}

void write_plotdata_csv(const std::string& path, const ComparisonResult& cmp) {
  auto out = open_out(path);
  out << "day,scenario,cumulative_cases,rt\n";
  for (const ArmOutcome& arm : cmp.arms) {
    if (arm.runs.empty()) continue;
    const std::size_t days = arm.runs.front().daily.size();
    for (std::size_t d = 0; d < days; ++d) {
      double cases = 0.0, rt = 0.0;
      for (const RunResult& r : arm.runs) {
        cases += static_cast<double>(r.daily[d].cumulative_cases);
        rt += r.daily[d].rt_estimate;
      }
      const double k = static_cast<double>(arm.runs.size());
      out << arm.runs.front().daily[d].day << ',' << arm.label << ','
          << format_number(cases / k) << ',' << format_number(rt / k) << '\n';
    }
  }
}

void write_comparison_json(const std::string& path, const ComparisonResult& cmp,
                           const std::vector<std::uint64_t>& seeds) {
  json arms = json::array();
  for (const ArmOutcome& arm : cmp.arms) {
    json cases_by_seed = json::array();
    for (const RunResult& r : arm.runs) cases_by_seed.push_back(r.final_cumulative_cases);
    arms.push_back({
        {"label", arm.label},
        {"mobility_scalar", arm.spec.mobility_scalar},
        {"equalization",
         {{"converged", arm.eq.converged},
          {"achieved_contacts", arm.eq.achieved_contacts},
          {"target_contacts", arm.eq.target_contacts},
          {"relative_gap", arm.eq.relative_gap},
          {"evaluations", arm.eq.evaluations}}},
        {"mean_final_cases", arm.mean_final_cases},
        {"mean_post_intervention_rt", arm.mean_post_rt},
        {"mean_post_intervention_contacts", arm.mean_post_contacts},
        {"final_cases_by_seed", cases_by_seed},
    });
  }
  json j{
      {"target_contacts", cmp.target_contacts},
      {"arms", arms},
      {"ordering_verdict", cmp.ordering_verdict},
      {"ordering_ok", cmp.ordering_ok},
      {"seeds", seeds},
      {"warnings", cmp.warnings},
  };
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

void write_manifest_json(const std::string& path, const SimConfig& cfg,
                         const std::vector<std::uint64_t>& seeds, const std::string& scenario,
                         const std::vector<std::string>& outputs, long long wall_ms) {
  json j{
      {"config_digest", config_digest(cfg)},
      {"seeds", seeds},
      {"scenario", scenario},
      {"version", kCodeVersion},
      {"outputs", outputs},
      {"wall_ms", wall_ms},
  };
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

}  // namespace riskmesh
