#include "handsoff/turnpike.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace handsoff {
namespace {

struct Point {
  double t;
  double y;
};

double envelope(double a, double t, double horizon) {
  return std::exp(-a * t) + std::exp(-a * (horizon - t));
}

// Relative least-squares misfit of c1 e^{-a t} + c2 e^{-a (T - t)} with the
// nonnegative amplitudes c1, c2 solved for in closed form.
double model_misfit(const std::vector<Point>& pts, double a, double horizon) {
  double s11 = 0.0, s12 = 0.0, s22 = 0.0, r1 = 0.0, r2 = 0.0;
  for (const Point& p : pts) {
    const double e1 = std::exp(-a * p.t) / p.y;
    const double e2 = std::exp(-a * (horizon - p.t)) / p.y;
    s11 += e1 * e1;
    s12 += e1 * e2;
    s22 += e2 * e2;
    r1 += e1;
    r2 += e2;
  }
  const double count = static_cast<double>(pts.size());
  // sum (c1 e1 + c2 e2 - 1)^2 expanded in the Gram entries.
  auto misfit = [&](double c1, double c2) {
    return c1 * c1 * s11 + 2.0 * c1 * c2 * s12 + c2 * c2 * s22 - 2.0 * (c1 * r1 + c2 * r2) +
           count;
  };
  double best = count;
  if (s11 > 0.0) best = std::min(best, misfit(r1 / s11, 0.0));
  if (s22 > 0.0) best = std::min(best, misfit(0.0, r2 / s22));
  const double det = s11 * s22 - s12 * s12;
  if (det > 1e-14 * s11 * s22) {
    const double c1 = (s22 * r1 - s12 * r2) / det;
    const double c2 = (s11 * r2 - s12 * r1) / det;
    if (c1 >= 0.0 && c2 >= 0.0) best = std::min(best, misfit(c1, c2));
  }
  return best;
}

double fit_decay_rate(const std::vector<Point>& pts, double horizon) {
  constexpr double kLogMin = -6.907755278982137;  // ln 1e-3
  constexpr double kLogMax = 6.907755278982137;   // ln 1e3
  constexpr int kGrid = 600;
  const double step = (kLogMax - kLogMin) / kGrid;
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kGrid; ++i) {
    const double v = model_misfit(pts, std::exp(kLogMin + i * step), horizon);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  // Golden-section refinement on the bracketing grid interval.
  double lo = kLogMin + std::max(best - 1, 0) * step;
  double hi = kLogMin + std::min(best + 1, kGrid) * step;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - g * (hi - lo);
  double d = lo + g * (hi - lo);
  double fc = model_misfit(pts, std::exp(c), horizon);
  double fd = model_misfit(pts, std::exp(d), horizon);
  for (int it = 0; it < 100 && hi - lo > 1e-12; ++it) {
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - g * (hi - lo);
      fc = model_misfit(pts, std::exp(c), horizon);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + g * (hi - lo);
      fd = model_misfit(pts, std::exp(d), horizon);
    }
  }
  return std::exp(0.5 * (lo + hi));
}

double mid_state_norm(const HandsOffSolution& sol) {
  const auto& xs = sol.state.values;
  if (xs.empty()) return 0.0;
  return norm2(xs[(xs.size() - 1) / 2]);
}

}  // namespace

std::vector<double> turnpike_profile(const HandsOffSolution& sol) {
  const std::size_t cells = sol.control.cells();
  std::vector<double> prof(sol.state.values.size(), 0.0);
  for (std::size_t k = 0; k < prof.size(); ++k) {
    const double u = cells == 0 ? 0.0 : norm1(sol.control.values[std::min(k, cells - 1)]);
    prof[k] = u + norm2(sol.state.values[k]);
  }
  return prof;
}

ResidenceMeasure residence_measure(const HandsOffSolution& sol, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("residence_measure: eps must be positive");
  const std::vector<double> prof = turnpike_profile(sol);
  const std::size_t cells = sol.control.cells();
  std::size_t outside = 0;
  for (std::size_t k = 0; k < cells; ++k) {
    if (prof[k] > eps) ++outside;
  }
  ResidenceMeasure r;
  r.measure = sol.control.step * static_cast<double>(outside);
  r.fraction = sol.horizon > 0.0 ? r.measure / sol.horizon : 0.0;
  return r;
}

EnvelopeFit fit_envelope(std::span<const HandsOffSolution> sols) {
  if (sols.empty()) throw FitError("fit_envelope: no solutions given");
  const HandsOffSolution* longest = &sols.front();
  for (const HandsOffSolution& s : sols) {
    if (s.horizon > longest->horizon) longest = &s;
  }
  bool any_signal = false;
  for (const HandsOffSolution& s : sols) {
    for (double v : turnpike_profile(s)) any_signal = any_signal || v > kProfileFloor;
  }
  if (!any_signal) throw FitError("nothing to fit: every profile vanishes");

  const double horizon = longest->horizon;
  const std::vector<double> prof = turnpike_profile(*longest);
  std::vector<Point> pts;
  for (std::size_t k = 0; k < prof.size(); ++k) {
    const double t = longest->state.time(k);
    const bool in_layer = t <= 0.25 * horizon || t >= 0.75 * horizon;
    if (in_layer && prof[k] > kProfileFloor) pts.push_back({t, prof[k]});
  }
  if (pts.size() < 2) {
    throw FitError("fit_envelope: fewer than two usable samples at T = " +
                   std::to_string(horizon));
  }

  EnvelopeFit fit;
  fit.a = fit_decay_rate(pts, horizon);
  double k = 0.0;
  for (const HandsOffSolution& s : sols) {
    const std::vector<double> p = turnpike_profile(s);
    for (std::size_t i = 0; i < p.size(); ++i) {
      k = std::max(k, p[i] / envelope(fit.a, s.state.time(i), s.horizon));
    }
  }
  // One part in 1e12 absorbs the rounding of profile / envelope * envelope.
  fit.k = k * (1.0 + 1e-12);
  fit.slack = 0.0;
  for (const HandsOffSolution& s : sols) {
    fit.slack = std::max(fit.slack, envelope_ratio(s, fit.k, fit.a));
  }
  return fit;
}

double envelope_ratio(const HandsOffSolution& sol, double k, double a) {
  if (!(k > 0.0) || !(a > 0.0)) throw std::invalid_argument("envelope: k and a must be positive");
  const std::vector<double> p = turnpike_profile(sol);
  double worst = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    worst = std::max(worst, p[i] / (k * envelope(a, sol.state.time(i), sol.horizon)));
  }
  return worst;
}

bool validate_envelope(const HandsOffSolution& sol, double k, double a, double slack_allowance) {
  if (!(k > 0.0) || !(a > 0.0)) throw std::invalid_argument("envelope: k and a must be positive");
  const std::vector<double> p = turnpike_profile(sol);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > slack_allowance * k * envelope(a, sol.state.time(i), sol.horizon)) return false;
  }
  return true;
}

HalfProblemReport half_problem_comparison(const BoundaryProblem& bp, double t_half) {
  bp.validate();
  if (!(t_half > 0.0) || t_half > bp.horizon) {
    throw std::invalid_argument("half_problem_comparison: need 0 < t_half <= T");
  }
  const std::size_t n = bp.sys.n();
  BoundaryProblem first = bp;
  first.horizon = t_half;
  first.xf = Vector(n);
  BoundaryProblem second = bp;
  second.horizon = t_half;
  second.x0 = Vector(n);
  first.validate();

  const double h_full = bp.step();
  const double h_half = first.step();
  if (std::abs(h_full - h_half) > 1e-9 * h_full) {
    throw std::invalid_argument(
        "half_problem_comparison: T and t_half must give the same grid step");
  }

  HalfProblemReport report;
  report.t_half = t_half;
  const HandsOffSolution full = solve_handsoff(bp);
  HandsOffSolution sol1;
  HandsOffSolution sol2;
  try {
    sol1 = solve_handsoff(first);
  } catch (const InfeasibleError&) {
    throw InfeasibleError("first half problem (x0 -> 0 on [0, " + std::to_string(t_half) +
                          "]) is infeasible");
  }
  try {
    sol2 = solve_handsoff(second);
  } catch (const InfeasibleError&) {
    throw InfeasibleError("second half problem (0 -> xf on [0, " + std::to_string(t_half) +
                          "]) is infeasible");
  }

  const std::size_t cells = full.control.cells();
  const std::size_t half_cells = sol1.control.cells();
  const double h = h_full;
  for (std::size_t k = 0; k < half_cells; ++k) {
    report.d1 += h * norm1(full.control.values[k] - sol1.control.values[k]);
    report.d2 += h * norm1(full.control.values[cells - half_cells + k] - sol2.control.values[k]);
  }
  report.mid_state_norm = mid_state_norm(full);
  report.first_l1 = sol1.l1_cost;
  report.second_l1 = sol2.l1_cost;
  return report;
}

std::vector<HorizonOutcome> solve_horizons(const BoundaryProblem& bp,
                                           const std::vector<double>& horizons,
                                           std::size_t threads, const SolveOptions& options) {
  std::vector<HorizonOutcome> out(horizons.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next.fetch_add(1); i < horizons.size(); i = next.fetch_add(1)) {
      out[i].horizon = horizons[i];
      BoundaryProblem p = bp;
      p.horizon = horizons[i];
      try {
        out[i].solution = solve_handsoff(p, options);
      } catch (const std::exception& e) {
        out[i].error = e.what();
      }
    }
  };
  const std::size_t count = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(horizons.size(), 1));
  std::vector<std::thread> pool;
  pool.reserve(count - 1);
  for (std::size_t t = 1; t < count; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  return out;
}

TurnpikeReport build_turnpike_report(const std::vector<HorizonOutcome>& outcomes,
                                     const TurnpikeOptions& options) {
  TurnpikeReport report;
  report.epsilons = options.epsilons;
  report.allowance = options.allowance;

  std::vector<HandsOffSolution> solved;
  for (const HorizonOutcome& o : outcomes) {
    report.horizons.push_back(o.horizon);
    HorizonSummary s;
    s.horizon = o.horizon;
    s.solved = o.solution.has_value();
    s.error = o.error;
    if (o.solution) {
      const HandsOffSolution& sol = *o.solution;
      s.l0_measure = sol.l0_measure;
      s.l1_cost = sol.l1_cost;
      s.support_intervals = sol.support_intervals;
      for (double eps : options.epsilons) {
        s.residence_fraction.push_back(1.0 - residence_measure(sol, eps).fraction);
      }
      s.mid_state_norm = mid_state_norm(sol);
      const std::vector<double> prof = turnpike_profile(sol);
      s.peak_profile = prof.empty() ? 0.0 : *std::max_element(prof.begin(), prof.end());
      s.bangoffbang_violation = sol.bangoffbang_violation;
      solved.push_back(sol);
    }
    report.per_horizon.push_back(std::move(s));
  }

  report.residence_monotone = true;
  report.mid_norm_monotone = true;
  const HorizonSummary* prev = nullptr;
  for (const HorizonSummary& s : report.per_horizon) {
    if (!s.solved) continue;
    if (prev != nullptr) {
      for (std::size_t e = 0; e < s.residence_fraction.size(); ++e) {
        if (s.residence_fraction[e] < prev->residence_fraction[e] - 1e-12) {
          report.residence_monotone = false;
        }
      }
      if (s.mid_state_norm > prev->mid_state_norm + 1e-3) report.mid_norm_monotone = false;
    }
    prev = &s;
  }

  if (solved.empty()) {
    report.fit_error = "no horizon was solved";
    return report;
  }
  try {
    report.fit = fit_envelope(solved);
  } catch (const FitError& e) {
    report.fit_error = e.what();
  }

  std::vector<double> solved_horizons;
  for (const HandsOffSolution& s : solved) solved_horizons.push_back(s.horizon);
  double fit_t = options.fit_horizon.value_or(
      solved_horizons.size() >= 3 ? solved_horizons[solved_horizons.size() - 3]
                                  : solved_horizons.front());
  const auto it = std::find_if(solved.begin(), solved.end(), [&](const HandsOffSolution& s) {
    return std::abs(s.horizon - fit_t) <= 1e-12 * std::max(1.0, fit_t);
  });
  if (it == solved.end()) return report;
  report.cross_fit_horizon = fit_t;
  try {
    report.cross_fit = fit_envelope(std::span<const HandsOffSolution>(&*it, 1));
  } catch (const FitError& e) {
    if (report.fit_error.empty()) report.fit_error = e.what();
    return report;
  }
  for (const HandsOffSolution& s : solved) {
    if (s.horizon <= fit_t) continue;
    EnvelopeCheck c;
    c.horizon = s.horizon;
    c.ratio = envelope_ratio(s, report.cross_fit->k, report.cross_fit->a);
    c.passed = validate_envelope(s, report.cross_fit->k, report.cross_fit->a, options.allowance);
    report.cross_checks.push_back(c);
  }
  return report;
}

}  // namespace handsoff
