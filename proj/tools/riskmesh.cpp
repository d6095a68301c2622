// riskmesh command line: run single scenarios, the five-arm comparison, the
// loopback protocol demo, aggregate exports and quantizer calibration.
#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <ios>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "protocol_demo.hpp"
#include "riskmesh/config.hpp"
#include "riskmesh/csv.hpp"
#include "riskmesh/risk.hpp"
#include "riskmesh/scenario.hpp"
#include "riskmesh/simulation.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitConvergence = 4;

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

long long ms_since(Clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
}

// Maps the exception taxonomy onto process exit codes: bad configuration
// content is distinct from files that cannot be read or written.
int guard(const char* verb, int (*body)(void*), void* ctx) {
  try {
    return body(ctx);
  } catch (const riskmesh::ConfigError& e) {
    std::fprintf(stderr, "%s: configuration error: %s\n", verb, e.what());
    return kExitConfig;
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "%s: io error: %s\n", verb, e.what());
    return kExitIo;
  } catch (const std::ios_base::failure& e) {
    std::fprintf(stderr, "%s: io error: %s\n", verb, e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s: %s\n", verb, e.what());
    return kExitFailure;
  }
}

template <typename F>
int guarded(const char* verb, F&& f) {
  auto body = [](void* ctx) { return (*static_cast<F*>(ctx))(); };
  return guard(verb, body, &f);
}

struct SimulateArgs {
  std::string config;
  std::string out;
  std::uint64_t seed = 1;
  std::string scenario = "unmitigated";
  double mobility_scalar = -1.0;
  int tracing_order = 1;
  bool encounters = false;
};

int cmd_simulate(const SimulateArgs& a) {
  auto t0 = Clock::now();
  riskmesh::SimConfig cfg = riskmesh::load_config(a.config);
  riskmesh::ScenarioSpec spec;
  spec.kind = riskmesh::scenario_kind_from_string(a.scenario);
  spec.mobility_scalar = a.mobility_scalar;
  spec.tracing_order = a.tracing_order;

  riskmesh::SimOptions opt;
  opt.collect_geo = false;
  opt.collect_encounters = a.encounters;
  riskmesh::Simulation sim_run(cfg, spec, a.seed, opt);
  sim_run.run();
  riskmesh::RunResult run = sim_run.take_result();

  fs::create_directories(a.out);
  std::vector<std::string> outputs = {"metrics.csv", "tree.csv", "validation.json"};
  riskmesh::write_metrics_csv(a.out + "/metrics.csv", run.daily);
  riskmesh::write_tree_csv(a.out + "/tree.csv", run.tree);
  riskmesh::write_validation_json(a.out + "/validation.json", run);
  if (a.encounters) {
    riskmesh::write_encounters_csv(a.out + "/encounters.csv", run.encounters_by_day,
                                   sim_run.world());
    outputs.push_back("encounters.csv");
  }
  riskmesh::write_manifest_json(a.out + "/manifest.json", cfg, {a.seed},
                                riskmesh::scenario_label(spec), outputs, ms_since(t0));

  std::printf("%s seed %llu: %lld cases over %d days", riskmesh::scenario_label(spec).c_str(),
              static_cast<unsigned long long>(a.seed),
              static_cast<long long>(run.final_cumulative_cases), cfg.world.n_days);
  if (run.post_intervention_mean_rt > 0.0) {
    std::printf(", post-intervention Rt %.2f", run.post_intervention_mean_rt);
  }
  std::printf("\n");
  std::printf("wrote %zu files to %s\n", outputs.size() + 1, a.out.c_str());
  return kExitOk;
}

struct CompareArgs {
  std::string config;
  std::string out;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  int threads = 1;
  int eq_seeds = 3;
  int max_evaluations = 40;
  double tolerance = 0.02;
  bool require_equalized = false;
};

int cmd_compare(const CompareArgs& a) {
  auto t0 = Clock::now();
  riskmesh::SimConfig cfg = riskmesh::load_config(a.config);
  riskmesh::ComparisonOptions opt;
  opt.threads = a.threads;
  opt.equalize_seed_count = a.eq_seeds;
  opt.equalize.max_evaluations = a.max_evaluations;
  opt.equalize.tolerance = a.tolerance;
  riskmesh::ComparisonResult cmp = riskmesh::run_comparison(cfg, a.seeds, opt);

  fs::create_directories(a.out);
  std::vector<std::string> outputs;
  for (const riskmesh::ArmOutcome& arm : cmp.arms) {
    for (const riskmesh::RunResult& run : arm.runs) {
      std::string name = "metrics_" + arm.label + "_s" + std::to_string(run.seed) + ".csv";
      riskmesh::write_metrics_csv(a.out + "/" + name, run.daily);
      outputs.push_back(name);
    }
  }
  riskmesh::write_plotdata_csv(a.out + "/plotdata.csv", cmp);
  riskmesh::write_comparison_json(a.out + "/summary.json", cmp, a.seeds);
  outputs.push_back("plotdata.csv");
  outputs.push_back("summary.json");
  riskmesh::write_manifest_json(a.out + "/manifest.json", cfg, a.seeds, "comparison", outputs,
                                ms_since(t0));

  std::printf("target post-intervention contacts/agent/day: %.3f\n", cmp.target_contacts);
  std::printf("%-18s %10s %12s %10s %10s\n", "arm", "scalar", "final_cases", "post_rt",
              "contacts");
  for (const riskmesh::ArmOutcome& arm : cmp.arms) {
    std::printf("%-18s %10.4f %12.1f %10.3f %10.3f\n", arm.label.c_str(),
                arm.spec.mobility_scalar, arm.mean_final_cases, arm.mean_post_rt,
                arm.mean_post_contacts);
  }
  std::printf("ordering: %s\n", cmp.ordering_verdict.c_str());
  for (const std::string& w : cmp.warnings) std::printf("warning: %s\n", w.c_str());

  if (a.require_equalized) {
    for (const riskmesh::ArmOutcome& arm : cmp.arms) {
      if (arm.eq.evaluations > 0 && !arm.eq.converged) {
        std::fprintf(stderr, "compare: %s failed to reach the contact target\n",
                     arm.label.c_str());
        return kExitConvergence;
      }
    }
  }
  return kExitOk;
}

struct ExportArgs {
  std::string config;
  std::string out;
  std::uint64_t seed = 1;
  std::string scenario = "risk_app";
};

int cmd_aggregate_export(const ExportArgs& a) {
  auto t0 = Clock::now();
  riskmesh::SimConfig cfg = riskmesh::load_config(a.config);
  riskmesh::ScenarioSpec spec;
  spec.kind = riskmesh::scenario_kind_from_string(a.scenario);
  riskmesh::SimOptions opt;
  opt.collect_geo = true;
  riskmesh::RunResult run = riskmesh::run_scenario(cfg, spec, a.seed, opt);

  fs::create_directories(a.out);
  riskmesh::write_heat_csv(a.out + "/heat.csv", run.aggregator, cfg.world.n_days);
  riskmesh::write_flow_csv(a.out + "/flow.csv", run.aggregator, cfg.world.n_days);
  riskmesh::write_manifest_json(a.out + "/manifest.json", cfg, {a.seed},
                                riskmesh::scenario_label(spec), {"heat.csv", "flow.csv"},
                                ms_since(t0));
  std::printf("wrote heat.csv and flow.csv to %s\n", a.out.c_str());
  return kExitOk;
}

struct CalibrateArgs {
  std::string config;
  std::string out;
  std::uint64_t seed = 1;
};

// Collects raw risk scores from an unmitigated run with the phone pipeline
// observing but never intervening, then freezes equal-frequency thresholds.
int cmd_calibrate(const CalibrateArgs& a) {
  auto t0 = Clock::now();
  riskmesh::SimConfig cfg = riskmesh::load_config(a.config);
  riskmesh::ScenarioSpec spec;
  spec.kind = riskmesh::ScenarioKind::risk_app;
  riskmesh::SimOptions opt;
  opt.collect_geo = false;
  opt.score_only_risk_engine = true;
  riskmesh::RunResult run = riskmesh::run_scenario(cfg, spec, a.seed, opt);
  if (run.calibration_scores.size() < 1000) {
    throw riskmesh::ConfigError("world",
                                "calibration run produced too few scores; raise population or n_days");
  }

  riskmesh::Quantizer q = riskmesh::Quantizer::fit(run.calibration_scores);
  fs::create_directories(a.out);
  q.save(a.out + "/quantizer-thresholds.txt");
  {
    std::ofstream f(a.out + "/calibration-scores.txt", std::ios::binary);
    f.exceptions(std::ios::failbit | std::ios::badbit);
    char buf[64];
    for (double s : run.calibration_scores) {
      std::snprintf(buf, sizeof(buf), "%.17g\n", s);
      f << buf;
    }
  }
  riskmesh::write_manifest_json(a.out + "/manifest.json", cfg, {a.seed}, "calibration",
                                {"quantizer-thresholds.txt", "calibration-scores.txt"},
                                ms_since(t0));
  std::printf("fitted 15 thresholds from %zu scores -> %s/quantizer-thresholds.txt\n",
              run.calibration_scores.size(), a.out.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"agent-level epidemic simulation with private contact messaging"};
  app.set_version_flag("--version", "riskmesh 0.1.0");
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* c_sim = app.add_subcommand("simulate", "run one scenario and write its metrics");
  c_sim->add_option("--config", sim.config, "configuration JSON")->required();
  c_sim->add_option("--out", sim.out, "output directory")->required();
  c_sim->add_option("--seed", sim.seed, "master seed");
  c_sim->add_option("--scenario", sim.scenario,
                    "unmitigated | social_distancing | binary_tracing | risk_app");
  c_sim->add_option("--mobility-scalar", sim.mobility_scalar,
                    "contact-reduction dial; negative = scenario default");
  c_sim->add_option("--tracing-order", sim.tracing_order, "binary tracing depth (1 or 2)");
  c_sim->add_flag("--encounters", sim.encounters, "also write the raw encounter stream");

  CompareArgs cmp;
  CLI::App* c_cmp = app.add_subcommand("compare", "run all five arms at matched mobility");
  c_cmp->add_option("--config", cmp.config, "configuration JSON")->required();
  c_cmp->add_option("--out", cmp.out, "output directory")->required();
  c_cmp->add_option("--seeds", cmp.seeds, "seed list (default 1..5)");
  c_cmp->add_option("--threads", cmp.threads, "worker threads");
  c_cmp->add_option("--eq-seeds", cmp.eq_seeds, "seeds used while tuning mobility dials");
  c_cmp->add_option("--max-evaluations", cmp.max_evaluations, "tuning budget per arm");
  c_cmp->add_option("--tolerance", cmp.tolerance, "relative contact-matching tolerance");
  c_cmp->add_flag("--require-equalized", cmp.require_equalized,
                  "exit 4 if any arm misses the contact target");

  riskmesh::demo::DemoOptions dmo;
  CLI::App* c_dmo = app.add_subcommand("protocol-demo",
                                       "run the mix chain as loopback HTTP services");
  c_dmo->add_option("--servers", dmo.servers, "mix hops");
  c_dmo->add_option("--batch", dmo.batch, "batch threshold");
  c_dmo->add_option("--messages", dmo.messages, "risk updates to send");
  c_dmo->add_option("--canaries", dmo.canaries, "self-addressed probes");
  c_dmo->add_option("--rounds", dmo.rounds, "pump rounds before epoch close");
  c_dmo->add_option("--port-base", dmo.port_base, "first loopback port");
  c_dmo->add_option("--seed", dmo.seed, "demo seed");
  c_dmo->add_flag("--null-crypto", dmo.null_crypto, "deterministic stand-in primitives");
  c_dmo->add_flag("--drop-attack", dmo.drop_attack,
                  "middle hop discards all traffic; canaries should alarm");

  ExportArgs exp;
  CLI::App* c_exp = app.add_subcommand("aggregate-export",
                                       "run with geo packets on and export heat/flow maps");
  c_exp->add_option("--config", exp.config, "configuration JSON")->required();
  c_exp->add_option("--out", exp.out, "output directory")->required();
  c_exp->add_option("--seed", exp.seed, "master seed");
  c_exp->add_option("--scenario", exp.scenario, "scenario (must run the risk engine)");

  CalibrateArgs cal;
  CLI::App* c_cal = app.add_subcommand("calibrate",
                                       "fit quantizer thresholds from a score-only run");
  c_cal->add_option("--config", cal.config, "configuration JSON")->required();
  c_cal->add_option("--out", cal.out, "output directory")->required();
  c_cal->add_option("--seed", cal.seed, "master seed");

  CLI11_PARSE(app, argc, argv);

  if (c_sim->parsed()) return guarded("simulate", [&] { return cmd_simulate(sim); });
  if (c_cmp->parsed()) return guarded("compare", [&] { return cmd_compare(cmp); });
  if (c_dmo->parsed()) {
    return guarded("protocol-demo", [&] { return riskmesh::demo::run_protocol_demo(dmo); });
  }
  if (c_exp->parsed()) {
    return guarded("aggregate-export", [&] { return cmd_aggregate_export(exp); });
  }
  if (c_cal->parsed()) return guarded("calibrate", [&] { return cmd_calibrate(cal); });
  return kExitFailure;
}
