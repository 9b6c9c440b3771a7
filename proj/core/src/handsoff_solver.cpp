#include "handsoff/handsoff_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace handsoff {
namespace {

std::optional<SpectralSplit> try_split(const Matrix& a) {
  try {
    return spectral_split(a);
  } catch (const NonHyperbolicError&) {
    return std::nullopt;
  }
}

// Columns G_k = Ad^{N-1-k} Bd (possibly mapped through M) for all cells,
// returned as one n x m matrix per cell.
std::vector<Matrix> plain_columns(const Discretization& d, std::size_t cells) {
  std::vector<Matrix> cols(cells);
  Matrix g = d.bd;
  for (std::size_t k = cells; k-- > 0;) {
    cols[k] = g;
    g = d.ad * g;
  }
  return cols;
}

std::vector<Matrix> dichotomic_columns(const Discretization& d, const Matrix& ad_inv,
                                       const SpectralSplit& s, std::size_t cells) {
  std::vector<Matrix> cols(cells);
  // Stable part P- Ad^{N-1-k} Bd decays toward early cells.
  const Matrix stable_step = s.p_minus * d.ad;
  Matrix g = s.p_minus * d.bd;
  for (std::size_t k = cells; k-- > 0;) {
    cols[k] = g;
    g = stable_step * g;
  }
  // Antistable part P+ Ad^{-(k+1)} Bd decays toward late cells.
  const Matrix back_step = s.p_plus * ad_inv;
  Matrix h = back_step * d.bd;
  for (std::size_t k = 0; k < cells; ++k) {
    cols[k] += h;
    h = back_step * h;
  }
  return cols;
}

Vector power_apply(const Matrix& step, Vector v, std::size_t times) {
  for (std::size_t i = 0; i < times; ++i) v = step * v;
  return v;
}

Vector control_from_lp(const Vector& x, std::size_t k, std::size_t m) {
  Vector u(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t p = Transcription::plus_index(k, i, m);
    u[i] = x[p] - x[p + 1];
  }
  return u;
}

double level_distance(double v, double& level) {
  level = std::clamp(std::round(v), -1.0, 1.0);
  return std::abs(v - level);
}

}  // namespace

double deadzone(double w) {
  if (w > 1.0) return 1.0;
  if (w < -1.0) return -1.0;
  return 0.0;
}

Vector deadzone(const Vector& w) {
  Vector out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = deadzone(w[i]);
  return out;
}

Transcription transcribe(const BoundaryProblem& bp) {
  bp.validate();
  const std::size_t n = bp.sys.n();
  const std::size_t m = bp.sys.m();
  const std::size_t cells = bp.grid_size();
  const double h = bp.step();

  Transcription tr;
  tr.cells = cells;
  tr.step = h;
  tr.disc = zoh_discretize(bp.sys.a(), bp.sys.b(), h);
  tr.ad_inverse = mat_exp((-h) * bp.sys.a());
  tr.split = try_split(bp.sys.a());

  std::vector<Matrix> cols;
  Vector target(n);
  if (tr.split) {
    const SpectralSplit& s = *tr.split;
    cols = dichotomic_columns(tr.disc, tr.ad_inverse, s, cells);
    const Vector stable_drift = power_apply(s.p_minus * tr.disc.ad, s.p_minus * bp.x0, cells);
    const Vector antistable_pull = power_apply(s.p_plus * tr.ad_inverse, s.p_plus * bp.xf, cells);
    target = (s.p_minus * bp.xf - stable_drift) + (antistable_pull - s.p_plus * bp.x0);
  } else {
    cols = plain_columns(tr.disc, cells);
    target = bp.xf - power_apply(tr.disc.ad, bp.x0, cells);
  }

  // Row equilibration: every row gets unit max-magnitude coefficient.
  tr.row_scale = Vector(n, 1.0);
  double largest = 0.0;
  double smallest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double row_max = 0.0;
    for (const Matrix& g : cols)
      for (std::size_t j = 0; j < m; ++j) row_max = std::max(row_max, std::abs(g(i, j)));
    if (row_max > 0.0) {
      tr.row_scale[i] = 1.0 / row_max;
      largest = std::max(largest, row_max);
      smallest = std::min(smallest, row_max);
    }
  }
  if (largest > 0.0 && largest / smallest > kMaxRowScaleRatio) {
    throw ConditioningError("transcription rows differ in scale by more than 1e12 (ratio " +
                            std::to_string(largest / smallest) +
                            "); shorten the horizon or rescale the model");
  }

  const std::size_t q = 2 * m * cells;
  LpProblem& lp = tr.lp;
  lp.c = Vector(q, h);
  lp.lower = Vector(q, 0.0);
  lp.upper = Vector(q, 1.0);
  lp.a_eq = Matrix(n, q);
  lp.b_eq = Vector(n);
  for (std::size_t i = 0; i < n; ++i) {
    lp.b_eq[i] = tr.row_scale[i] * target[i];
    for (std::size_t k = 0; k < cells; ++k) {
      for (std::size_t j = 0; j < m; ++j) {
        const double v = tr.row_scale[i] * cols[k](i, j);
        const std::size_t p = Transcription::plus_index(k, j, m);
        lp.a_eq(i, p) = v;
        lp.a_eq(i, p + 1) = -v;
      }
    }
  }
  return tr;
}

CostateTrajectory recover_costate(const Transcription& tr, const Vector& duals) {
  const std::size_t n = tr.disc.ad.rows();
  if (duals.size() != n) throw DimensionError("recover_costate: need one dual per state");
  Vector scaled(n);
  for (std::size_t i = 0; i < n; ++i) scaled[i] = tr.row_scale[i] * duals[i];

  const std::size_t cells = tr.cells;
  CostateTrajectory p{tr.step, std::vector<Vector>(cells + 1), Vector(n)};
  const Matrix ad_t = tr.disc.ad.transposed();
  if (!tr.split) {
    p.values[cells] = scaled;
    for (std::size_t k = cells; k-- > 0;) p.values[k] = ad_t * p.values[k + 1];
    p.terminal_adjoint = scaled;
    return p;
  }

  // p(t) = e^{A^T (T-t)} P-^T y + e^{-A^T t} P+^T y; both pieces decay in
  // the direction they are propagated.
  const Matrix pm_t = tr.split->p_minus.transposed();
  const Matrix pp_t = tr.split->p_plus.transposed();
  const Matrix stable_back = pm_t * ad_t;
  const Matrix antistable_fwd = pp_t * tr.ad_inverse.transposed();
  std::vector<Vector> stable(cells + 1);
  stable[cells] = pm_t * scaled;
  for (std::size_t k = cells; k-- > 0;) stable[k] = stable_back * stable[k + 1];
  Vector anti = pp_t * scaled;
  for (std::size_t k = 0; k <= cells; ++k) {
    p.values[k] = stable[k] + anti;
    if (k < cells) anti = antistable_fwd * anti;
  }
  p.terminal_adjoint = p.values[cells];
  return p;
}

CostateTrajectory recover_costate(const BoundaryProblem& bp, const Vector& duals) {
  return recover_costate(transcribe(bp), duals);
}

HandsOffSolution solve_handsoff(const BoundaryProblem& bp, const SolveOptions& options) {
  const Transcription tr = transcribe(bp);
  const LpSolution lp = solve_lp(tr.lp);
  if (lp.status == LpStatus::kInfeasible) {
    throw InfeasibleError("horizon too short or target unreachable (T = " +
                          std::to_string(bp.horizon) + ")");
  }
  if (lp.status == LpStatus::kUnbounded) {
    // Every variable is boxed, so this cannot happen for a valid transcription.
    throw std::logic_error("solve_handsoff: bounded LP reported unbounded");
  }

  const std::size_t m = bp.sys.m();
  const double h = tr.step;
  HandsOffSolution sol;
  sol.horizon = bp.horizon;
  sol.control.step = h;
  sol.control.values.reserve(tr.cells);
  for (std::size_t k = 0; k < tr.cells; ++k) {
    sol.control.values.push_back(control_from_lp(lp.x, k, m));
  }
  sol.state = tr.split ? simulate_dichotomic(bp.sys, *tr.split, bp.x0, bp.xf, sol.control)
                       : simulate(bp.sys, bp.x0, sol.control);
  sol.costate = recover_costate(tr, lp.duals);
  sol.lp_objective = lp.objective;
  sol.lp_iterations = lp.iterations;

  std::size_t support_cells = 0;
  bool open = false;
  for (std::size_t k = 0; k < tr.cells; ++k) {
    const Vector& u = sol.control.values[k];
    sol.l1_cost += h * norm1(u);
    const bool on = norm_inf(u) > options.support_threshold;
    if (on) {
      ++support_cells;
      if (!open) sol.support_intervals.push_back({sol.control.time(k), 0.0});
      sol.support_intervals.back().end = sol.control.time(k + 1);
    }
    open = on;
  }
  sol.l0_measure = h * static_cast<double>(support_cells);
  sol.normal = check_normality(bp.sys).normal;
  sol.bangoffbang_violation = verify_bangoffbang(sol).worst_violation;
  return sol;
}

double control_law_agreement(const LtiSystem& sys, const HandsOffSolution& sol) {
  const std::size_t cells = sol.control.cells();
  if (cells == 0) return 1.0;
  if (sol.costate.values.size() < cells) throw DimensionError("costate shorter than control");
  const Matrix bt = sys.b().transposed();
  std::size_t agree = 0;
  for (std::size_t k = 0; k < cells; ++k) {
    const Vector law = deadzone(bt * sol.costate.values[k]);
    if (norm_inf(law - sol.control.values[k]) <= kBangTolerance) ++agree;
  }
  return static_cast<double>(agree) / static_cast<double>(cells);
}

BangOffBangReport verify_bangoffbang(const HandsOffSolution& sol) {
  BangOffBangReport report;
  report.normality_guaranteed = sol.normal;
  const auto& u = sol.control.values;
  const std::size_t cells = u.size();
  const std::size_t m = cells == 0 ? 0 : u.front().size();

  std::vector<double> dist(cells, 0.0);
  std::vector<std::vector<double>> level(cells, std::vector<double>(m, 0.0));
  std::vector<bool> on_level(cells, true);
  for (std::size_t k = 0; k < cells; ++k) {
    for (std::size_t i = 0; i < m; ++i) {
      dist[k] = std::max(dist[k], level_distance(u[k][i], level[k][i]));
    }
    on_level[k] = dist[k] <= kBangTolerance;
  }

  std::size_t k = 0;
  std::optional<std::size_t> last_level;
  while (k < cells) {
    if (on_level[k]) {
      if (last_level && *last_level + 1 == k) {
        for (std::size_t i = 0; i < m; ++i) {
          if (level[k][i] != level[*last_level][i]) ++report.switching_instants;
        }
      }
      last_level = k;
      ++k;
      continue;
    }
    // Maximal run [k, e) of off-level cells.
    std::size_t e = k;
    while (e < cells && !on_level[e]) ++e;
    const bool has_prev = k > 0;
    const bool has_next = e < cells;
    std::size_t allowed = 0;
    for (std::size_t i = 0; i < m; ++i) {
      bool component_off = false;
      for (std::size_t j = k; j < e; ++j) {
        double lv;
        if (level_distance(u[j][i], lv) > kBangTolerance) component_off = true;
      }
      if (has_prev && has_next) {
        if (level[k - 1][i] != level[e][i]) {
          allowed += 1;
        } else if (component_off) {
          allowed += 2;
        }
      } else if (component_off) {
        allowed += 1;
      }
    }
    allowed = std::max<std::size_t>(allowed, 1);
    report.switching_instants += allowed;

    std::vector<std::size_t> run(e - k);
    std::iota(run.begin(), run.end(), k);
    std::stable_sort(run.begin(), run.end(),
                     [&](std::size_t a, std::size_t b) { return dist[a] > dist[b]; });
    for (std::size_t r = 0; r < run.size(); ++r) {
      if (r < allowed) {
        ++report.excluded_cells;
      } else {
        ++report.violating_cells;
        report.worst_violation = std::max(report.worst_violation, dist[run[r]]);
      }
    }
    k = e;
  }
  for (std::size_t j = 0; j < cells; ++j) {
    if (on_level[j]) report.worst_violation = std::max(report.worst_violation, dist[j]);
  }
  report.passed = report.violating_cells == 0;
  report.possible_singular_arcs = !report.passed || !report.normality_guaranteed;
  return report;
}

bool is_feasible(const BoundaryProblem& bp) {
  if (grid_cells(bp.horizon, bp.steps_per_unit_time) < 2) return false;
  const Transcription tr = transcribe(bp);
  LpOptions opts;
  opts.feasibility_only = true;
  return solve_lp(tr.lp, opts).status != LpStatus::kInfeasible;
}

double min_feasible_horizon(const BoundaryProblem& bp, double t_lo, double t_hi) {
  if (!(t_lo < t_hi) || !(t_hi > 0.0)) {
    throw std::invalid_argument("min_feasible_horizon: need 0 < t_hi and t_lo < t_hi");
  }
  BoundaryProblem probe = bp;
  auto feasible_at = [&](double t) {
    probe.horizon = t;
    return is_feasible(probe);
  };
  if (!feasible_at(t_hi)) {
    throw InfeasibleError("infeasible at t_hi = " + std::to_string(t_hi) + "; increase t_hi");
  }
  double lo = std::max(t_lo, 0.0);
  double hi = t_hi;
  if (lo > 0.0 && feasible_at(lo)) return lo;
  const double width = 1.0 / static_cast<double>(bp.steps_per_unit_time);
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    if (feasible_at(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace handsoff
