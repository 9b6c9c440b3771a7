#pragma once

// Maximum hands-off control through its L1 relaxation.
//
// Under the normality condition (each (A, b_j) controllable, A nonsingular)
// the minimum-fuel control with |u_i| <= 1 is bang-off-bang and therefore
// also minimizes the measure of the support of u. The problem is transcribed
// to an LP over piecewise-constant controls with the states eliminated, so
// only n equality rows remain regardless of the horizon.

#include <cstddef>
#include <optional>
#include <vector>

#include "handsoff/linalg.hpp"
#include "handsoff/lp_solver.hpp"
#include "handsoff/lti_model.hpp"
#include "handsoff/spectral.hpp"

namespace handsoff {

inline constexpr double kSupportThreshold = 1e-6;
inline constexpr double kBangTolerance = 1e-6;
inline constexpr double kMaxRowScaleRatio = 1e12;

/// Samples p(k h), k = 0..N, of p' = -A^T p with p(T) = terminal_adjoint.
struct CostateTrajectory {
  double step = 0.0;
  std::vector<Vector> values;
  Vector terminal_adjoint;
};

struct SupportInterval {
  double start = 0.0;
  double end = 0.0;
};

struct HandsOffSolution {
  double horizon = 0.0;
  ControlTrajectory control;
  StateTrajectory state;
  CostateTrajectory costate;
  double l1_cost = 0.0;     // sum_k h sum_i |u_k^i|
  double l0_measure = 0.0;  // h * #cells with max_i |u_k^i| > support threshold
  std::vector<SupportInterval> support_intervals;
  double bangoffbang_violation = 0.0;
  double lp_objective = 0.0;
  std::size_t lp_iterations = 0;
  bool normal = false;  // sufficient normality condition held for the plant
};

struct SolveOptions {
  double support_threshold = kSupportThreshold;
};

/// Single-valued dead-zone: -1 below -1, +1 above 1, 0 on [-1, 1].
[[nodiscard]] double deadzone(double w);
[[nodiscard]] Vector deadzone(const Vector& w);

/// LP form of one boundary problem, plus what is needed to map the LP
/// answer back to trajectories.
///
/// Variable 2 (k m + i) is u_k^{i,+} and 2 (k m + i) + 1 is u_k^{i,-}, both
/// in [0, 1] with cost h. The equality rows are row_scale * M applied to the
/// terminal condition sum_k Ad^{N-1-k} Bd u_k = xf - Ad^N x0, where M = I
/// for a non-hyperbolic A and M = P- + Ad^{-N} P+ otherwise. The second form
/// keeps every coefficient bounded even when the unstable modes grow by many
/// orders of magnitude over the horizon.
struct Transcription {
  LpProblem lp;
  Discretization disc;
  Matrix ad_inverse;  // e^{-A h}
  std::size_t cells = 0;
  double step = 0.0;
  std::optional<SpectralSplit> split;  // set iff the dichotomic form is used
  Vector row_scale;

  [[nodiscard]] bool dichotomic() const { return split.has_value(); }
  [[nodiscard]] static std::size_t plus_index(std::size_t k, std::size_t i, std::size_t m) {
    return 2 * (k * m + i);
  }
};

/// Throws ConditioningError when the row scale factors span more than
/// twelve orders of magnitude.
[[nodiscard]] Transcription transcribe(const BoundaryProblem& bp);

/// Throws InfeasibleError when no admissible control reaches xf at T.
[[nodiscard]] HandsOffSolution solve_handsoff(const BoundaryProblem& bp,
                                              const SolveOptions& options = {});

/// Costate from the equality-row multipliers of the transcription.
///
/// With reduced costs d = h - G_k^T nu for u^+ (and h + G_k^T nu for u^-),
/// LP optimality gives u_k = dz(G_k^T nu / h), where G_k^T nu / h is the
/// cell average of B^T p(t) for p(t) = e^{A^T (T - t)} nu. Hence the
/// terminal adjoint is nu = M^T diag(row_scale) y with no further scaling.
[[nodiscard]] CostateTrajectory recover_costate(const Transcription& tr, const Vector& duals);
[[nodiscard]] CostateTrajectory recover_costate(const BoundaryProblem& bp, const Vector& duals);

/// Fraction of cells on which dz(B^T p(t_k)) matches u_k within
/// kBangTolerance in every component.
[[nodiscard]] double control_law_agreement(const LtiSystem& sys, const HandsOffSolution& sol);

struct BangOffBangReport {
  double worst_violation = 0.0;  // over cells that were not excluded
  std::size_t switching_instants = 0;
  std::size_t excluded_cells = 0;
  std::size_t violating_cells = 0;
  bool passed = false;
  bool normality_guaranteed = false;
  bool possible_singular_arcs = false;
};

/// Distance of each u_k^i to {-1, 0, 1}. A run of off-level cells is where
/// the continuous control switches mid-cell; at most one cell per switching
/// instant inside the run is excluded (two when the run sits between equal
/// levels, i.e. a pulse, one at the ends of the horizon).
[[nodiscard]] BangOffBangReport verify_bangoffbang(const HandsOffSolution& sol);

/// Feasibility of the transcription at the problem's own horizon.
[[nodiscard]] bool is_feasible(const BoundaryProblem& bp);

/// Bisection on T between t_lo and t_hi down to one grid step; returns the
/// smallest feasible probe. Throws InfeasibleError if t_hi is infeasible.
[[nodiscard]] double min_feasible_horizon(const BoundaryProblem& bp, double t_lo, double t_hi);

}  // namespace handsoff
