#include "riskmesh/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace riskmesh {

namespace {

struct Job {
  ScenarioSpec spec;
  std::uint64_t seed = 0;
  RunResult* out = nullptr;
};

// Runs every job, fanning out across workers when asked; each run owns its
// world, so jobs share nothing but the config.
void run_jobs(const SimConfig& cfg, std::vector<Job>& jobs, const SimOptions& sim_opt,
              int threads) {
  auto one = [&](Job& j) { *j.out = run_scenario(cfg, j.spec, j.seed, sim_opt); };
  if (threads <= 1 || jobs.size() <= 1) {
    for (Job& j : jobs) one(j);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        one(jobs[i]);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int n = std::min<int>(threads, static_cast<int>(jobs.size()));
  pool.reserve(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string percent(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", 100.0 * x);
  return buf;
}

}  // namespace

EqualizationReport equalize_scalar(const std::function<double(double)>& measure,
                                   double default_scalar, double target,
                                   const EqualizeOptions& opt) {
  if (!(target > 0.0)) throw std::invalid_argument("equalization target must be positive");
  EqualizationReport rep;
  rep.target_contacts = target;
  auto consider = [&](double scalar, double measured) {
    double g = std::abs(measured - target) / target;
    if (rep.evaluations == 1 || g < rep.relative_gap) {
      rep.scalar = scalar;
      rep.achieved_contacts = measured;
      rep.relative_gap = g;
    }
    return g;
  };

  double m0 = measure(default_scalar);
  rep.evaluations = 1;
  if (consider(default_scalar, m0) <= opt.tolerance) {
    rep.converged = true;
    return rep;
  }

  // f(s) = measure(s) - target falls as s grows. Bracket the root.
  double lo, hi, f_lo, f_hi;
  if (m0 > target) {
    lo = default_scalar;
    f_lo = m0 - target;
    hi = opt.scalar_hi;
    if (!(hi > lo)) return rep;
    double mh = measure(hi);
    rep.evaluations += 1;
    if (consider(hi, mh) <= opt.tolerance) {
      rep.converged = true;
      return rep;
    }
    f_hi = mh - target;
    if (f_hi > 0.0) return rep;  // full dial still above target
  } else {
    hi = default_scalar;
    f_hi = m0 - target;
    lo = opt.scalar_lo;
    if (!(lo < hi)) return rep;
    double ml = measure(lo);
    rep.evaluations += 1;
    if (consider(lo, ml) <= opt.tolerance) {
      rep.converged = true;
      return rep;
    }
    f_lo = ml - target;
    if (f_lo < 0.0) return rep;  // boosting as far as allowed stays below target
  }

  // Illinois variant of regula falsi: halve the stale endpoint's residual
  // whenever the same side survives twice, so one flat end cannot stall it.
  int kept_side = 0;
  while (rep.evaluations < opt.max_evaluations && hi - lo > 1e-9) {
    double s = (f_lo * hi - f_hi * lo) / (f_lo - f_hi);
    double pad = 1e-3 * (hi - lo);
    s = std::clamp(s, lo + pad, hi - pad);
    double m = measure(s);
    rep.evaluations += 1;
    if (consider(s, m) <= opt.tolerance) {
      rep.converged = true;
      return rep;
    }
    double f = m - target;
    if (f > 0.0) {
      lo = s;
      f_lo = f;
      if (kept_side == 1) f_hi *= 0.5;
      kept_side = 1;
    } else {
      hi = s;
      f_hi = f;
      if (kept_side == -1) f_lo *= 0.5;
      kept_side = -1;
    }
  }
  return rep;
}

ComparisonResult run_comparison(const SimConfig& cfg, const std::vector<std::uint64_t>& seeds,
                                const ComparisonOptions& opt) {
  if (seeds.empty()) throw std::invalid_argument("comparison needs at least one seed");
  ComparisonResult out;

  std::vector<std::uint64_t> eq_seeds(
      seeds.begin(),
      seeds.begin() + std::min<std::size_t>(seeds.size(),
                                            static_cast<std::size_t>(std::max(
                                                1, opt.equalize_seed_count))));
  SimOptions tuning_opt;
  tuning_opt.collect_geo = false;

  auto mean_contacts_at = [&](const ScenarioSpec& base, double scalar) {
    ScenarioSpec probe = base;
    probe.mobility_scalar = scalar;
    std::vector<RunResult> runs(eq_seeds.size());
    std::vector<Job> jobs;
    jobs.reserve(eq_seeds.size());
    for (std::size_t i = 0; i < eq_seeds.size(); ++i)
      jobs.push_back({probe, eq_seeds[i], &runs[i]});
    run_jobs(cfg, jobs, tuning_opt, opt.threads);
    double sum = 0.0;
    for (const RunResult& r : runs) sum += r.post_intervention_mean_contacts;
    return sum / static_cast<double>(runs.size());
  };

  auto make_arm = [&](ScenarioKind kind, int order) {
    ArmOutcome arm;
    arm.spec.kind = kind;
    arm.spec.tracing_order = order;
    arm.label = scenario_label(arm.spec);
    return arm;
  };
  out.arms.push_back(make_arm(ScenarioKind::unmitigated, 1));
  out.arms.push_back(make_arm(ScenarioKind::social_distancing, 1));
  out.arms.push_back(make_arm(ScenarioKind::binary_tracing, 1));
  out.arms.push_back(make_arm(ScenarioKind::binary_tracing, 2));
  out.arms.push_back(make_arm(ScenarioKind::risk_app, 1));

  // The distancing arm, run at its configured strength, sets the common
  // contact target; every other intervention arm is tuned to meet it.
  out.target_contacts =
      mean_contacts_at(out.arms[1].spec, cfg.scenario.distancing_strength);
  for (std::size_t i = 0; i < out.arms.size(); ++i) {
    ArmOutcome& arm = out.arms[i];
    if (arm.spec.kind == ScenarioKind::unmitigated) {
      arm.spec.mobility_scalar = 0.0;
      arm.eq.target_contacts = out.target_contacts;
      continue;  // the baseline is deliberately left untouched
    }
    double dial0 = arm.spec.kind == ScenarioKind::social_distancing
                       ? cfg.scenario.distancing_strength
                       : 0.0;
    arm.eq = equalize_scalar(
        [&](double s) { return mean_contacts_at(arm.spec, s); }, dial0,
        out.target_contacts, opt.equalize);
    arm.spec.mobility_scalar = arm.eq.scalar;
    if (!arm.eq.converged) {
      out.warnings.push_back(arm.label + ": mobility equalization missed the target by " +
                             percent(arm.eq.relative_gap) + " after " +
                             std::to_string(arm.eq.evaluations) + " evaluations");
    }
  }

  // Final runs: every arm on every seed at the tuned dials.
  SimOptions final_opt;
  final_opt.collect_geo = opt.collect_geo;
  std::vector<Job> jobs;
  for (ArmOutcome& arm : out.arms) {
    arm.runs.resize(seeds.size());
    for (std::size_t i = 0; i < seeds.size(); ++i)
      jobs.push_back({arm.spec, seeds[i], &arm.runs[i]});
  }
  run_jobs(cfg, jobs, final_opt, opt.threads);

  for (ArmOutcome& arm : out.arms) {
    double cases = 0.0, rt = 0.0, contacts = 0.0;
    for (const RunResult& r : arm.runs) {
      cases += static_cast<double>(r.final_cumulative_cases);
      rt += r.post_intervention_mean_rt;
      contacts += r.post_intervention_mean_contacts;
    }
    const double k = static_cast<double>(arm.runs.size());
    arm.mean_final_cases = cases / k;
    arm.mean_post_rt = rt / k;
    arm.mean_post_contacts = contacts / k;
  }

  if (seeds.size() < 3) {
    out.ordering_verdict =
        "insufficient seeds (" + std::to_string(seeds.size()) + " < 3): ordering not assessed";
    out.ordering_ok = false;
    return out;
  }
  out.ordering_ok = true;
  for (std::size_t i = 0; i + 1 < out.arms.size(); ++i) {
    if (!(out.arms[i].mean_final_cases > out.arms[i + 1].mean_final_cases)) {
      out.ordering_ok = false;
      char buf[160];
      std::snprintf(buf, sizeof(buf), "violated: %s (%.1f) <= %s (%.1f)",
                    out.arms[i].label.c_str(), out.arms[i].mean_final_cases,
                    out.arms[i + 1].label.c_str(), out.arms[i + 1].mean_final_cases);
      out.ordering_verdict = buf;
      break;
    }
  }
  if (out.ordering_ok) out.ordering_verdict = "expected";
  return out;
}

}  // namespace riskmesh
