#pragma once

// Quantitative turnpike checks on families of hands-off solutions that share
// a plant and endpoints but differ in horizon.
//
// The profile of a solution is |u(t)|_1 + ||x(t)||_2 sampled at the grid
// instants t_k = k h, k = 0..N (the last instant reuses the last control).

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "handsoff/handsoff_solver.hpp"
#include "handsoff/lti_model.hpp"

namespace handsoff {

inline const std::vector<double> kDefaultEpsilons = {0.01, 0.05, 0.1, 0.5};
inline constexpr double kDefaultEnvelopeAllowance = 1.2;
inline constexpr double kProfileFloor = 1e-8;

[[nodiscard]] std::vector<double> turnpike_profile(const HandsOffSolution& sol);

struct ResidenceMeasure {
  double measure = 0.0;   // time spent with |u| + ||x|| > eps
  double fraction = 0.0;  // measure / T
};

/// Sums h over the cells whose left sample has |u_k| + ||x_k|| > eps.
[[nodiscard]] ResidenceMeasure residence_measure(const HandsOffSolution& sol, double eps);

struct EnvelopeFit {
  double k = 0.0;
  double a = 0.0;
  double slack = 0.0;  // max profile / (k envelope) over the fitted solutions
};

/// Fits |u| + ||x|| <= k (e^{-a t} + e^{-a (T - t)}).
///
/// The decay rate comes from the longest horizon: the instants in the two
/// boundary layers [0, T/4] and [3T/4, T] whose profile exceeds 1e-8 are
/// matched, in relative least squares, by c1 e^{-a t} + c2 e^{-a (T - t)}
/// with free nonnegative amplitudes. Unequal layers at the two ends and their
/// overlap in the middle (where ||x|| is not the sum of the two layer norms)
/// would otherwise bias a upwards. k is then the
/// smallest constant for which the symmetric inequality holds on every grid
/// instant of every solution.
/// Throws FitError if all profiles vanish.
[[nodiscard]] EnvelopeFit fit_envelope(std::span<const HandsOffSolution> sols);

/// Largest profile / (k envelope) over the grid.
[[nodiscard]] double envelope_ratio(const HandsOffSolution& sol, double k, double a);

[[nodiscard]] bool validate_envelope(const HandsOffSolution& sol, double k, double a,
                                     double slack_allowance);

struct HalfProblemReport {
  double t_half = 0.0;
  double d1 = 0.0;  // int_0^{t_half} |u_full - u_first| dt
  double d2 = 0.0;  // int_0^{t_half} |u_full(T - t_half + t) - u_second(t)| dt
  double mid_state_norm = 0.0;
  double first_l1 = 0.0;
  double second_l1 = 0.0;
};

/// Solves the full problem, x0 -> 0 on [0, t_half] and 0 -> xf on
/// [0, t_half] at the same grid density and compares the boundary layers.
/// Throws InfeasibleError naming the half that failed.
[[nodiscard]] HalfProblemReport half_problem_comparison(const BoundaryProblem& bp,
                                                        double t_half);

struct HorizonOutcome {
  double horizon = 0.0;
  std::optional<HandsOffSolution> solution;
  std::string error;
};

/// Solves bp at each horizon on up to `threads` worker threads. Results are
/// in input order and do not depend on the thread count.
[[nodiscard]] std::vector<HorizonOutcome> solve_horizons(const BoundaryProblem& bp,
                                                         const std::vector<double>& horizons,
                                                         std::size_t threads,
                                                         const SolveOptions& options = {});

struct HorizonSummary {
  double horizon = 0.0;
  bool solved = false;
  std::string error;
  double l0_measure = 0.0;
  double l1_cost = 0.0;
  std::vector<SupportInterval> support_intervals;
  /// Per epsilon: fraction of [0, T] with |u| + ||x|| <= eps.
  std::vector<double> residence_fraction;
  double mid_state_norm = 0.0;  // ||x(T/2)||
  double peak_profile = 0.0;
  double bangoffbang_violation = 0.0;
};

struct EnvelopeCheck {
  double horizon = 0.0;
  double ratio = 0.0;
  bool passed = false;
};

struct TurnpikeOptions {
  std::vector<double> epsilons = kDefaultEpsilons;
  /// Horizon used for the fit-then-validate check; defaults to the
  /// third-largest horizon (the smallest if there are fewer than three).
  std::optional<double> fit_horizon;
  double allowance = kDefaultEnvelopeAllowance;
};

struct TurnpikeReport {
  std::vector<double> horizons;
  std::vector<double> epsilons;
  std::vector<HorizonSummary> per_horizon;
  std::optional<EnvelopeFit> fit;  // over every solved horizon
  std::string fit_error;
  std::optional<double> cross_fit_horizon;
  std::optional<EnvelopeFit> cross_fit;
  double allowance = kDefaultEnvelopeAllowance;
  std::vector<EnvelopeCheck> cross_checks;
  bool residence_monotone = false;  // at each epsilon, non-decreasing in T
  bool mid_norm_monotone = false;   // non-increasing in T within 1e-3
};

[[nodiscard]] TurnpikeReport build_turnpike_report(const std::vector<HorizonOutcome>& outcomes,
                                                   const TurnpikeOptions& options = {});

}  // namespace handsoff
