#pragma once

// Plant and boundary-problem definitions, structural checks and
// zero-order-hold simulation.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "handsoff/linalg.hpp"
#include "handsoff/spectral.hpp"

namespace handsoff {

/// x' = A x + B u with A n x n and B n x m, m >= 1.
class LtiSystem {
 public:
  LtiSystem(Matrix a, Matrix b);

  [[nodiscard]] const Matrix& a() const { return a_; }
  [[nodiscard]] const Matrix& b() const { return b_; }
  [[nodiscard]] std::size_t n() const { return a_.rows(); }
  [[nodiscard]] std::size_t m() const { return b_.cols(); }

 private:
  Matrix a_;
  Matrix b_;
};

inline constexpr int kDefaultStepsPerUnitTime = 200;

/// Steer x0 (t = 0) to xf (t = horizon) on a uniform grid of
/// round(horizon * steps_per_unit_time) cells.
struct BoundaryProblem {
  LtiSystem sys;
  Vector x0;
  Vector xf;
  double horizon = 0.0;
  int steps_per_unit_time = kDefaultStepsPerUnitTime;

  /// Throws std::invalid_argument / DimensionError on a malformed problem.
  void validate() const;
  [[nodiscard]] std::size_t grid_size() const;
  [[nodiscard]] double step() const { return horizon / static_cast<double>(grid_size()); }
};

/// Number of cells for a horizon; may be < 2 for tiny horizons.
[[nodiscard]] std::size_t grid_cells(double horizon, int steps_per_unit_time);

/// Piecewise-constant input: values[k] holds on [k h, (k+1) h).
struct ControlTrajectory {
  double step = 0.0;
  std::vector<Vector> values;

  [[nodiscard]] std::size_t cells() const { return values.size(); }
  [[nodiscard]] double time(std::size_t k) const { return static_cast<double>(k) * step; }
};

/// Samples x(k h), k = 0..N.
struct StateTrajectory {
  double step = 0.0;
  std::vector<Vector> values;

  [[nodiscard]] double time(std::size_t k) const { return static_cast<double>(k) * step; }
};

/// Rank of [B, AB, ..., A^{n-1}B], or of [b_j, A b_j, ...] when `col` is
/// given. Elimination with full pivoting, pivot threshold 1e-10 relative to
/// the largest entry.
[[nodiscard]] std::size_t controllability_rank(const LtiSystem& sys,
                                               std::optional<std::size_t> col = std::nullopt);

struct NormalityReport {
  bool normal = false;
  std::vector<std::string> reasons;
};

/// Sufficient normality condition: every (A, b_j) controllable and A
/// nonsingular.
[[nodiscard]] NormalityReport check_normality(const LtiSystem& sys);

enum class Classification { kTurnpikeCertified, kExistenceOnly, kUncertified };

[[nodiscard]] const char* to_string(Classification c);

struct CheckReport {
  NormalityReport normality;
  bool hyperbolic = false;
  std::size_t stable_dim = 0;
  std::optional<bool> x0_in_stable;       // empty when A is not hyperbolic
  std::optional<bool> xf_in_antistable;   // empty when A is not hyperbolic
  std::optional<bool> feasible_at_horizon;  // probed only for non-hyperbolic A
  Classification classification = Classification::kUncertified;
  std::vector<std::string> reasons;
  std::vector<std::string> warnings;
};

/// Aggregates normality, hyperbolicity and endpoint memberships.
///
/// turnpike-certified: normal, hyperbolic, x0 in L-(A), xf in L+(A).
/// existence-only: normal, A not hyperbolic (spectral hypotheses cannot be
///   certified), but the transcribed problem is feasible at bp.horizon, so
///   an optimal bang-off-bang control exists for that horizon.
/// uncertified: everything else.
[[nodiscard]] CheckReport check_problem(const BoundaryProblem& bp);

/// Forward recursion x_{k+1} = Ad x_k + Bd u_k with (Ad, Bd) the exact ZOH
/// discretization for the control's step.
[[nodiscard]] StateTrajectory simulate(const LtiSystem& sys, const Vector& x0,
                                       const ControlTrajectory& u);

/// Two-point reconstruction of a trajectory known to join x0 and xf: the
/// stable component is propagated forward from x0 and the antistable one
/// backward from xf. Each step still satisfies the discrete dynamics to
/// round-off, but round-off is never amplified by the unstable modes, which
/// makes long horizons usable. values[0] is set to x0 exactly.
[[nodiscard]] StateTrajectory simulate_dichotomic(const LtiSystem& sys,
                                                  const SpectralSplit& split,
                                                  const Vector& x0, const Vector& xf,
                                                  const ControlTrajectory& u);

/// Largest ||x_{k+1} - Ad x_k - Bd u_k||_inf over the trajectory.
[[nodiscard]] double dynamics_residual(const LtiSystem& sys, const StateTrajectory& x,
                                       const ControlTrajectory& u);

}  // namespace handsoff
