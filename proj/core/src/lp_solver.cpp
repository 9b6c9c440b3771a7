#include "handsoff/lp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace handsoff {
namespace {

constexpr double kOptimalityTolerance = 1e-9;
constexpr double kFeasibilityTolerance = 1e-9;
constexpr double kDegenerateStep = 1e-12;

bool is_finite_bound(double v) { return std::abs(v) < kLpInfinity; }

enum class VarState { kBasic, kAtLower, kAtUpper, kFree };

// Phase bookkeeping for one solve. Structural columns come first, followed by
// one artificial column per row (a signed unit vector).
class RevisedSimplex {
 public:
  RevisedSimplex(const LpProblem& lp, const LpOptions& options)
      : lp_(lp),
        options_(options),
        q_(lp.num_vars()),
        r_(lp.num_rows()),
        total_(q_ + r_),
        lower_(total_),
        upper_(total_),
        x_(total_),
        state_(total_),
        art_sign_(r_, 1.0),
        basis_(r_),
        binv_(Matrix::identity(r_)) {}

  LpSolution run() {
    initialize();
    LpSolution out;

    // Phase 1: drive the artificial variables to zero.
    std::vector<double> phase1_cost(total_, 0.0);
    for (std::size_t i = 0; i < r_; ++i) phase1_cost[q_ + i] = 1.0;
    const double feas_tol = kFeasibilityTolerance * std::max(1.0, norm_inf(lp_.b_eq));
    const Outcome p1 = iterate(phase1_cost, feas_tol);
    if (p1 == Outcome::kIterationLimit) {
      throw std::runtime_error("solve_lp: iteration limit reached in phase 1");
    }
    if (infeasibility() > feas_tol) {
      out.status = LpStatus::kInfeasible;
      finish(out, phase1_cost);
      return out;
    }

    // Artificials may stay basic at zero (redundant rows) but never re-enter.
    for (std::size_t i = 0; i < r_; ++i) upper_[q_ + i] = 0.0;

    std::vector<double> cost(total_, 0.0);
    for (std::size_t j = 0; j < q_; ++j) cost[j] = lp_.c[j];
    if (options_.feasibility_only) {
      out.status = LpStatus::kOptimal;
      finish(out, cost);
      return out;
    }
    const Outcome p2 = iterate(cost, -1.0);
    if (p2 == Outcome::kIterationLimit) {
      throw std::runtime_error("solve_lp: iteration limit reached in phase 2");
    }
    out.status = p2 == Outcome::kUnbounded ? LpStatus::kUnbounded : LpStatus::kOptimal;
    finish(out, cost);
    return out;
  }

 private:
  enum class Outcome { kOptimal, kUnbounded, kIterationLimit, kFeasible };

  void initialize() {
    for (std::size_t j = 0; j < q_; ++j) {
      lower_[j] = lp_.lower[j];
      upper_[j] = lp_.upper[j];
      if (is_finite_bound(lower_[j])) {
        x_[j] = lower_[j];
        state_[j] = VarState::kAtLower;
      } else if (is_finite_bound(upper_[j])) {
        x_[j] = upper_[j];
        state_[j] = VarState::kAtUpper;
      } else {
        x_[j] = 0.0;
        state_[j] = VarState::kFree;
      }
    }
    std::vector<double> residual(lp_.b_eq.begin(), lp_.b_eq.end());
    for (std::size_t i = 0; i < r_; ++i) {
      const auto row = lp_.a_eq.row(i);
      for (std::size_t j = 0; j < q_; ++j) residual[i] -= row[j] * x_[j];
    }
    for (std::size_t i = 0; i < r_; ++i) {
      const std::size_t a = q_ + i;
      art_sign_[i] = residual[i] >= 0.0 ? 1.0 : -1.0;
      lower_[a] = 0.0;
      upper_[a] = kLpInfinity;
      x_[a] = std::abs(residual[i]);
      state_[a] = VarState::kBasic;
      basis_[i] = a;
      binv_(i, i) = art_sign_[i];
    }
  }

  double infeasibility() const {
    double s = 0.0;
    for (std::size_t i = 0; i < r_; ++i) s += std::abs(x_[q_ + i]);
    return s;
  }

  double column_entry(std::size_t j, std::size_t i) const {
    if (j < q_) return lp_.a_eq(i, j);
    return (j - q_ == i) ? art_sign_[i] : 0.0;
  }

  // B^{-1} a_j
  std::vector<double> ftran(std::size_t j) const {
    std::vector<double> alpha(r_, 0.0);
    if (j >= q_) {
      const std::size_t i = j - q_;
      for (std::size_t k = 0; k < r_; ++k) alpha[k] = binv_(k, i) * art_sign_[i];
      return alpha;
    }
    for (std::size_t i = 0; i < r_; ++i) {
      const double a = lp_.a_eq(i, j);
      if (a == 0.0) continue;
      for (std::size_t k = 0; k < r_; ++k) alpha[k] += binv_(k, i) * a;
    }
    return alpha;
  }

  void refactor() {
    Matrix b(r_, r_);
    for (std::size_t k = 0; k < r_; ++k)
      for (std::size_t i = 0; i < r_; ++i) b(i, k) = column_entry(basis_[k], i);
    binv_ = inverse(b);
    recompute_basic_values();
    pivots_since_refactor_ = 0;
  }

  void recompute_basic_values() {
    std::vector<double> rhs(lp_.b_eq.begin(), lp_.b_eq.end());
    for (std::size_t j = 0; j < total_; ++j) {
      if (state_[j] == VarState::kBasic || x_[j] == 0.0) continue;
      for (std::size_t i = 0; i < r_; ++i) rhs[i] -= column_entry(j, i) * x_[j];
    }
    for (std::size_t k = 0; k < r_; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < r_; ++i) s += binv_(k, i) * rhs[i];
      x_[basis_[k]] = s;
    }
  }

  std::vector<double> multipliers(const std::vector<double>& cost) const {
    std::vector<double> y(r_, 0.0);
    for (std::size_t k = 0; k < r_; ++k) {
      const double cb = cost[basis_[k]];
      if (cb == 0.0) continue;
      for (std::size_t i = 0; i < r_; ++i) y[i] += cb * binv_(k, i);
    }
    return y;
  }

  double reduced_cost(std::size_t j, const std::vector<double>& cost,
                      const std::vector<double>& y) const {
    double d = cost[j];
    for (std::size_t i = 0; i < r_; ++i) d -= y[i] * column_entry(j, i);
    return d;
  }

  // Signed improvement direction for nonbasic j, or 0 if j is not eligible.
  int eligible(std::size_t j, double d) const {
    switch (state_[j]) {
      case VarState::kBasic:
        return 0;
      case VarState::kAtLower:
        if (upper_[j] - lower_[j] <= 0.0) return 0;
        return d < -kOptimalityTolerance ? 1 : 0;
      case VarState::kAtUpper:
        if (upper_[j] - lower_[j] <= 0.0) return 0;
        return d > kOptimalityTolerance ? -1 : 0;
      case VarState::kFree:
        if (d < -kOptimalityTolerance) return 1;
        return d > kOptimalityTolerance ? -1 : 0;
    }
    return 0;
  }

  // stop_infeasibility >= 0 ends phase 1 as soon as the artificial sum is
  // within tolerance.
  Outcome iterate(const std::vector<double>& cost, double stop_infeasibility) {
    std::size_t degenerate_run = 0;
    bool bland = false;
    while (true) {
      if (stop_infeasibility >= 0.0 && infeasibility() <= stop_infeasibility) {
        return Outcome::kFeasible;
      }
      if (iterations_ >= options_.max_iterations) return Outcome::kIterationLimit;
      if (pivots_since_refactor_ >= kRefactorInterval) refactor();

      const std::vector<double> y = multipliers(cost);
      std::size_t entering = total_;
      int direction = 0;
      double best = 0.0;
      for (std::size_t j = 0; j < total_; ++j) {
        if (state_[j] == VarState::kBasic) continue;
        const double d = reduced_cost(j, cost, y);
        const int dir = eligible(j, d);
        if (dir == 0) continue;
        if (bland) {
          entering = j;
          direction = dir;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          entering = j;
          direction = dir;
        }
      }
      if (entering == total_) return Outcome::kOptimal;

      const std::vector<double> alpha = ftran(entering);

      // Ratio test.
      double theta = std::numeric_limits<double>::infinity();
      std::size_t leave_pos = r_;
      bool leave_to_upper = false;
      double leave_pivot = 0.0;
      for (std::size_t k = 0; k < r_; ++k) {
        const double delta = direction * alpha[k];
        const std::size_t var = basis_[k];
        double limit;
        bool to_upper;
        if (delta > kPivotTolerance) {
          if (!is_finite_bound(lower_[var])) continue;
          limit = (x_[var] - lower_[var]) / delta;
          to_upper = false;
        } else if (delta < -kPivotTolerance) {
          if (!is_finite_bound(upper_[var])) continue;
          limit = (upper_[var] - x_[var]) / -delta;
          to_upper = true;
        } else {
          continue;
        }
        limit = std::max(limit, 0.0);
        bool take = false;
        if (leave_pos == r_ || limit < theta - kRatioTolerance) {
          take = true;
        } else if (limit <= theta + kRatioTolerance) {
          // Tie: Bland picks the lowest variable index, otherwise the
          // largest pivot magnitude, then the lowest index.
          if (bland) {
            take = var < basis_[leave_pos];
          } else if (std::abs(delta) > std::abs(leave_pivot)) {
            take = true;
          } else if (std::abs(delta) == std::abs(leave_pivot)) {
            take = var < basis_[leave_pos];
          }
        }
        if (take) {
          theta = leave_pos == r_ ? limit : std::min(theta, limit);
          leave_pos = k;
          leave_to_upper = to_upper;
          leave_pivot = delta;
        }
      }

      const double flip = (is_finite_bound(lower_[entering]) && is_finite_bound(upper_[entering]))
                              ? upper_[entering] - lower_[entering]
                              : std::numeric_limits<double>::infinity();
      if (leave_pos == r_ && std::isinf(flip)) return Outcome::kUnbounded;

      ++iterations_;
      entering_sequence_.push_back(entering);

      const bool bound_flip = flip <= theta;
      const double step = bound_flip ? flip : theta;
      for (std::size_t k = 0; k < r_; ++k) x_[basis_[k]] -= step * direction * alpha[k];

      if (bound_flip) {
        if (direction > 0) {
          x_[entering] = upper_[entering];
          state_[entering] = VarState::kAtUpper;
        } else {
          x_[entering] = lower_[entering];
          state_[entering] = VarState::kAtLower;
        }
      } else {
        x_[entering] += step * direction;
        const std::size_t leaving = basis_[leave_pos];
        if (leave_to_upper) {
          x_[leaving] = upper_[leaving];
          state_[leaving] = VarState::kAtUpper;
        } else {
          x_[leaving] = lower_[leaving];
          state_[leaving] = VarState::kAtLower;
        }
        state_[entering] = VarState::kBasic;
        basis_[leave_pos] = entering;
        // Eta update of the explicit inverse.
        const double pivot = alpha[leave_pos];
        for (std::size_t i = 0; i < r_; ++i) binv_(leave_pos, i) /= pivot;
        for (std::size_t k = 0; k < r_; ++k) {
          if (k == leave_pos || alpha[k] == 0.0) continue;
          const double f = alpha[k];
          for (std::size_t i = 0; i < r_; ++i) binv_(k, i) -= f * binv_(leave_pos, i);
        }
        ++pivots_since_refactor_;
      }

      if (step <= kDegenerateStep) {
        if (++degenerate_run >= kDegenerateBeforeBland) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
    }
  }

  void finish(LpSolution& out, const std::vector<double>& cost) {
    if (pivots_since_refactor_ > 0) refactor();
    out.x = Vector(std::vector<double>(x_.begin(), x_.begin() + static_cast<long>(q_)));
    double obj = 0.0;
    for (std::size_t j = 0; j < q_; ++j) obj += lp_.c[j] * x_[j];
    out.objective = obj;
    const std::vector<double> y = multipliers(cost);
    out.duals = Vector(y);
    std::vector<double> d(q_);
    for (std::size_t j = 0; j < q_; ++j) d[j] = reduced_cost(j, cost, y);
    out.reduced_costs = Vector(std::move(d));
    out.basis = basis_;
    out.entering_sequence = std::move(entering_sequence_);
    out.iterations = iterations_;
  }

  const LpProblem& lp_;
  const LpOptions& options_;
  std::size_t q_;
  std::size_t r_;
  std::size_t total_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> x_;
  std::vector<VarState> state_;
  std::vector<double> art_sign_;
  std::vector<std::size_t> basis_;
  Matrix binv_;
  std::size_t pivots_since_refactor_ = 0;
  std::size_t iterations_ = 0;
  std::vector<std::size_t> entering_sequence_;
};

}  // namespace

void LpProblem::validate() const {
  const std::size_t q = c.size();
  if (a_eq.cols() != q && !(a_eq.rows() == 0 && b_eq.size() == 0)) {
    throw DimensionError("LpProblem: a_eq has " + std::to_string(a_eq.cols()) +
                         " columns but c has " + std::to_string(q) + " entries");
  }
  if (a_eq.rows() != b_eq.size()) throw DimensionError("LpProblem: a_eq rows != b_eq length");
  if (lower.size() != q || upper.size() != q) {
    throw DimensionError("LpProblem: bound vectors must have one entry per variable");
  }
  for (std::size_t j = 0; j < q; ++j) {
    if (lower[j] > upper[j]) {
      throw std::invalid_argument("LpProblem: lower > upper for variable " + std::to_string(j));
    }
  }
}

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
  }
  return "infeasible";
}

LpSolution solve_lp(const LpProblem& lp, const LpOptions& options) {
  lp.validate();
  RevisedSimplex simplex(lp, options);
  return simplex.run();
}

}  // namespace handsoff
