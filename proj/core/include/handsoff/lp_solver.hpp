#pragma once

// Bounded-variable revised simplex for
//
//   minimize c^T x  subject to  A x = b,  lower <= x <= upper.
//
// The basis inverse is kept explicitly and updated in product form (one
// eta transformation per pivot), with a fresh inversion every 50 pivots.
// Pricing is Dantzig's rule with ties going to the lowest column index; after
// 50 consecutive degenerate pivots the solver switches to Bland's rule until
// the next nondegenerate step. No randomness is involved, so a given input
// always produces the same pivot sequence.

#include <cstddef>
#include <vector>

#include "handsoff/linalg.hpp"

namespace handsoff {

/// Bound magnitude treated as infinite.
inline constexpr double kLpInfinity = 1e30;

struct LpProblem {
  Vector c;
  Matrix a_eq;
  Vector b_eq;
  Vector lower;
  Vector upper;

  [[nodiscard]] std::size_t num_vars() const { return c.size(); }
  [[nodiscard]] std::size_t num_rows() const { return b_eq.size(); }
  /// Throws DimensionError / std::invalid_argument on inconsistent data.
  void validate() const;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

[[nodiscard]] const char* to_string(LpStatus s);

struct LpOptions {
  /// Stop after phase 1; the returned point is feasible but not optimized.
  bool feasibility_only = false;
  std::size_t max_iterations = 2'000'000;
};

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  Vector x;
  double objective = 0.0;
  /// Simplex multipliers y of the equality rows: reduced cost d = c - A^T y.
  Vector duals;
  Vector reduced_costs;
  /// Indices of the basic variables at termination (values >= num_vars()
  /// denote artificial columns that stayed basic at zero).
  std::vector<std::size_t> basis;
  /// Entering variable of every iteration, in order.
  std::vector<std::size_t> entering_sequence;
  std::size_t iterations = 0;
};

inline constexpr double kPivotTolerance = 1e-9;
inline constexpr double kRatioTolerance = 1e-10;
inline constexpr std::size_t kRefactorInterval = 50;
inline constexpr std::size_t kDegenerateBeforeBland = 50;

[[nodiscard]] LpSolution solve_lp(const LpProblem& lp, const LpOptions& options = {});

}  // namespace handsoff
