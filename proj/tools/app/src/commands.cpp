#include "handsoff_app/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <thread>

#include <nlohmann/json.hpp>

#include "handsoff/errors.hpp"
#include "handsoff_app/artifacts.hpp"
#include "handsoff_app/plots.hpp"

namespace handsoff::app {
namespace {

constexpr double kAnchorZeroStart = 0.046;
constexpr double kAnchorZeroEnd = 1.69;
constexpr double kAnchorZeroTolerance = 0.02;
constexpr double kAnchorL0 = 0.356;
constexpr double kAnchorL0Tolerance = 0.02;
constexpr double kAnchorEpsilon = 0.05;
constexpr double kMidNormTolerance = 1e-3;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const char* yes_no(bool b) { return b ? "yes" : "no"; }

void write_solution(const RunConfig& cfg, const HandsOffSolution& sol) {
  const BoundaryProblem bp = cfg.problem(sol.horizon);
  const std::string tag = horizon_tag(sol.horizon);
  write_text(cfg.output_dir / ("traj_" + tag + ".csv"), trajectory_csv(sol));
  write_text(cfg.output_dir / ("summary_" + tag + ".json"), solution_summary_json(bp, sol));
}

void print_solution(const HandsOffSolution& sol, std::ostream& out) {
  out << "T = " << num(sol.horizon) << ": l0 = " << num(sol.l0_measure)
      << ", l1 = " << num(sol.l1_cost) << ", bang-off-bang violation = "
      << num(sol.bangoffbang_violation) << "\n";
  out << "  support:";
  if (sol.support_intervals.empty()) out << " (empty)";
  for (const SupportInterval& iv : sol.support_intervals) {
    out << " [" << num(iv.start) << ", " << num(iv.end) << "]";
  }
  out << "\n";
}

std::string infeasibility_hint(const BoundaryProblem& bp) {
  double t_hi = bp.horizon;
  for (int i = 0; i < 5; ++i) {
    t_hi *= 2.0;
    BoundaryProblem probe = bp;
    probe.horizon = t_hi;
    if (is_feasible(probe)) {
      return "smallest feasible horizon on this grid is about " +
             num(min_feasible_horizon(bp, bp.horizon, t_hi));
    }
  }
  return "still infeasible at T = " + num(t_hi) + "; xf may be unreachable";
}

struct SweepRun {
  int code = kExitOk;
  std::vector<HorizonOutcome> outcomes;
};

SweepRun run_sweep(const RunConfig& cfg, std::size_t threads, std::ostream& out,
                   std::ostream& err) {
  SweepRun run;
  const BoundaryProblem base = cfg.problem(cfg.horizons.front());
  base.validate();
  run.outcomes = solve_horizons(base, cfg.horizons, threads,
                                SolveOptions{cfg.support_threshold});

  TurnpikeOptions topt;
  topt.epsilons = cfg.epsilons;
  const TurnpikeReport report = build_turnpike_report(run.outcomes, topt);

  std::vector<const HandsOffSolution*> solved;
  for (const HorizonOutcome& o : run.outcomes) {
    if (o.solution) {
      write_solution(cfg, *o.solution);
      solved.push_back(&*o.solution);
    } else {
      err << "T = " << num(o.horizon) << ": " << o.error << "\n";
      run.code = kExitSolverFailure;
    }
  }
  write_text(cfg.output_dir / "turnpike_report.json", turnpike_report_json(report));
  write_plots(cfg.output_dir, solved.empty() ? nullptr : solved.front(), solved);

  out << "T";
  out << "\tl0\tl1\t|x(T/2)|";
  for (double e : report.epsilons) out << "\tres(" << num(e) << ")";
  out << "\n";
  for (const HorizonSummary& s : report.per_horizon) {
    out << num(s.horizon);
    if (!s.solved) {
      out << "\tfailed: " << s.error << "\n";
      continue;
    }
    out << "\t" << num(s.l0_measure) << "\t" << num(s.l1_cost) << "\t" << num(s.mid_state_norm);
    for (double r : s.residence_fraction) out << "\t" << num(r);
    out << "\n";
  }
  if (report.fit) {
    out << "envelope fit: k = " << num(report.fit->k) << ", a = " << num(report.fit->a) << "\n";
  } else {
    out << "envelope fit: " << report.fit_error << "\n";
  }
  if (report.cross_fit) {
    out << "fit on T = " << num(*report.cross_fit_horizon) << ": k = " << num(report.cross_fit->k)
        << ", a = " << num(report.cross_fit->a) << "\n";
    for (const EnvelopeCheck& c : report.cross_checks) {
      out << "  T = " << num(c.horizon) << ": ratio " << num(c.ratio) << " (allowance "
          << num(report.allowance) << ") " << (c.passed ? "pass" : "FAIL") << "\n";
    }
  }
  out << "residence monotone: " << yes_no(report.residence_monotone)
      << ", mid-norm monotone: " << yes_no(report.mid_norm_monotone) << "\n";
  out << "wrote " << cfg.output_dir.string() << "/turnpike_report.json\n";
  return run;
}

}  // namespace

void apply_overrides(RunConfig& cfg, const Overrides& ov) {
  if (ov.steps_per_unit_time) {
    if (*ov.steps_per_unit_time < 1) throw ConfigError("--steps-per-unit must be positive");
    cfg.steps_per_unit_time = *ov.steps_per_unit_time;
  }
  if (ov.support_threshold) {
    if (!(*ov.support_threshold >= 0.0)) {
      throw ConfigError("--support-threshold must be nonnegative");
    }
    cfg.support_threshold = *ov.support_threshold;
  }
  if (ov.output_dir) cfg.output_dir = *ov.output_dir;
}

std::size_t sweep_threads() {
  if (const char* env = std::getenv("HANDSOFF_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int cmd_check(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  CheckReport r;
  try {
    r = check_problem(cfg.problem(cfg.horizons.back()));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  out << "normality: " << yes_no(r.normality.normal) << "\n";
  out << "hyperbolic: " << yes_no(r.hyperbolic);
  if (r.hyperbolic) out << " (stable dimension " << r.stable_dim << ")";
  out << "\n";
  if (r.x0_in_stable) out << "x0 in L-(A): " << yes_no(*r.x0_in_stable) << "\n";
  if (r.xf_in_antistable) out << "xf in L+(A): " << yes_no(*r.xf_in_antistable) << "\n";
  if (r.feasible_at_horizon) {
    out << "feasible at T = " << num(cfg.horizons.back()) << ": "
        << yes_no(*r.feasible_at_horizon) << "\n";
  }
  for (const std::string& s : r.reasons) out << "  - " << s << "\n";
  for (const std::string& s : r.warnings) out << "  warning: " << s << "\n";
  out << "classification: " << to_string(r.classification) << "\n";
  return r.classification == Classification::kTurnpikeCertified ? kExitOk : kExitCheckFailed;
}

int cmd_solve(const RunConfig& cfg, double horizon, std::ostream& out, std::ostream& err) {
  const auto listed = std::find_if(cfg.horizons.begin(), cfg.horizons.end(), [&](double t) {
    return std::abs(t - horizon) <= 1e-12 * std::max(1.0, t);
  });
  if (listed == cfg.horizons.end()) {
    err << "error: horizon " << num(horizon) << " is not listed in the config\n";
    return kExitInputError;
  }
  const BoundaryProblem bp = cfg.problem(*listed);
  try {
    bp.validate();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  HandsOffSolution sol;
  try {
    sol = solve_handsoff(bp, SolveOptions{cfg.support_threshold});
  } catch (const InfeasibleError& e) {
    err << "error: " << e.what() << "\n" << "hint: " << infeasibility_hint(bp) << "\n";
    return kExitSolverFailure;
  } catch (const ConditioningError& e) {
    err << "error: " << e.what() << "\n";
    return kExitSolverFailure;
  }
  write_solution(cfg, sol);
  write_plots(cfg.output_dir, &sol, {&sol});
  print_solution(sol, out);
  out << "wrote " << (cfg.output_dir / ("traj_" + horizon_tag(sol.horizon) + ".csv")).string()
      << "\n";
  return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, std::size_t threads, std::ostream& out, std::ostream& err) {
  if (cfg.horizons.size() < 2) {
    err << "error: sweep needs >= 2 horizons\n";
    return kExitInputError;
  }
  try {
    return run_sweep(cfg, threads, out, err).code;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

std::vector<Anchor> evaluate_anchors(const std::vector<HorizonOutcome>& outcomes) {
  std::vector<Anchor> anchors;
  const HorizonOutcome* shortest = outcomes.empty() ? nullptr : &outcomes.front();
  Anchor zs{"zero interval start", num(kAnchorZeroStart), num(kAnchorZeroTolerance), "-", false};
  Anchor ze{"zero interval end", num(kAnchorZeroEnd), num(kAnchorZeroTolerance), "-", false};
  Anchor l0{"l0 measure", num(kAnchorL0), num(kAnchorL0Tolerance), "-", false};
  if (shortest != nullptr && shortest->solution) {
    if (auto zero = longest_zero_interval(*shortest->solution)) {
      zs.measured = num(zero->start);
      zs.passed = std::abs(zero->start - kAnchorZeroStart) <= kAnchorZeroTolerance;
      ze.measured = num(zero->end);
      ze.passed = std::abs(zero->end - kAnchorZeroEnd) <= kAnchorZeroTolerance;
    }
    l0.measured = num(shortest->solution->l0_measure);
    l0.passed = std::abs(shortest->solution->l0_measure - kAnchorL0) <= kAnchorL0Tolerance;
  }
  anchors.push_back(zs);
  anchors.push_back(ze);
  anchors.push_back(l0);

  Anchor res{"residence(eps=0.05) trend", "non-decreasing in T", "0", "", true};
  Anchor mid{"|x(T/2)| trend", "non-increasing in T", num(kMidNormTolerance), "", true};
  double prev_res = -1.0;
  double prev_mid = std::numeric_limits<double>::infinity();
  for (const HorizonOutcome& o : outcomes) {
    if (!res.measured.empty()) res.measured += ",";
    if (!mid.measured.empty()) mid.measured += ",";
    if (!o.solution) {
      res.measured += "?";
      mid.measured += "?";
      res.passed = mid.passed = false;
      continue;
    }
    const double r = 1.0 - residence_measure(*o.solution, kAnchorEpsilon).fraction;
    const HandsOffSolution& s = *o.solution;
    const double m = norm2(s.state.values[(s.state.values.size() - 1) / 2]);
    res.measured += num(r);
    mid.measured += num(m);
    res.passed = res.passed && r >= prev_res;
    mid.passed = mid.passed && m <= prev_mid + kMidNormTolerance;
    prev_res = r;
    prev_mid = m;
  }
  anchors.push_back(res);
  anchors.push_back(mid);
  return anchors;
}

int cmd_reproduce(const RunConfig& cfg, std::size_t threads, std::ostream& out,
                  std::ostream& err) {
  out << "== check\n";
  const int check_code = cmd_check(cfg, out, err);
  out << "== sweep over";
  for (double t : cfg.horizons) out << " " << num(t);
  out << "\n";
  SweepRun run;
  try {
    run = run_sweep(cfg, threads, out, err);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  const std::vector<Anchor> anchors = evaluate_anchors(run.outcomes);
  out << "== anchors\n";
  std::size_t width = 0;
  for (const Anchor& a : anchors) width = std::max(width, a.name.size());
  nlohmann::json table = nlohmann::json::array();
  bool all = true;
  for (const Anchor& a : anchors) {
    out << a.name << std::string(width + 2 - a.name.size(), ' ') << (a.passed ? "pass" : "FAIL")
        << "  expected " << a.expected << " (tol " << a.tolerance << "), measured "
        << a.measured << "\n";
    table.push_back({{"name", a.name},
                     {"expected", a.expected},
                     {"tolerance", a.tolerance},
                     {"measured", a.measured},
                     {"passed", a.passed}});
    all = all && a.passed;
  }
  write_text(cfg.output_dir / "anchors.json", table.dump(2) + "\n");
  if (run.code != kExitOk) return run.code;
  if (check_code != kExitOk || !all) return kExitCheckFailed;
  return kExitOk;
}

}  // namespace handsoff::app
