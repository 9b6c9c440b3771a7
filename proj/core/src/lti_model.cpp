#include "handsoff/lti_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace handsoff {
namespace {

constexpr double kRankTolerance = 1e-10;
constexpr double kDeterminantTolerance = 1e-10;

std::size_t rank_full_pivot(Matrix m) {
  const double scale = max_abs(m);
  if (scale == 0.0) return 0;
  const double tol = kRankTolerance * scale;
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  std::size_t rank = 0;
  for (; rank < std::min(rows, cols); ++rank) {
    std::size_t pr = rank, pc = rank;
    double best = 0.0;
    for (std::size_t i = rank; i < rows; ++i) {
      for (std::size_t j = rank; j < cols; ++j) {
        if (std::abs(m(i, j)) > best) {
          best = std::abs(m(i, j));
          pr = i;
          pc = j;
        }
      }
    }
    if (best <= tol) break;
    for (std::size_t j = 0; j < cols; ++j) std::swap(m(rank, j), m(pr, j));
    for (std::size_t i = 0; i < rows; ++i) std::swap(m(i, rank), m(i, pc));
    for (std::size_t i = rank + 1; i < rows; ++i) {
      const double l = m(i, rank) / m(rank, rank);
      for (std::size_t j = rank; j < cols; ++j) m(i, j) -= l * m(rank, j);
    }
  }
  return rank;
}

Matrix kalman_matrix(const Matrix& a, const Matrix& b) {
  const std::size_t n = a.rows();
  const std::size_t m = b.cols();
  Matrix k(n, n * m);
  Matrix power_b = b;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) k(i, p * m + j) = power_b(i, j);
    power_b = a * power_b;
  }
  return k;
}

void require_control_shape(const LtiSystem& sys, const ControlTrajectory& u) {
  if (!(u.step > 0.0)) throw std::invalid_argument("control trajectory has no positive step");
  for (const Vector& v : u.values) {
    if (v.size() != sys.m()) throw DimensionError("control vector length != input dimension");
  }
}

}  // namespace

LtiSystem::LtiSystem(Matrix a, Matrix b) : a_(std::move(a)), b_(std::move(b)) {
  if (!a_.is_square() || a_.rows() == 0) throw DimensionError("A must be square and nonempty");
  if (b_.rows() != a_.rows()) throw DimensionError("B must have as many rows as A");
  if (b_.cols() == 0) throw DimensionError("B must have at least one column");
}

std::size_t grid_cells(double horizon, int steps_per_unit_time) {
  const double cells = std::round(horizon * static_cast<double>(steps_per_unit_time));
  return cells < 0.0 ? 0 : static_cast<std::size_t>(cells);
}

void BoundaryProblem::validate() const {
  if (x0.size() != sys.n()) throw DimensionError("x0 length does not match state dimension");
  if (xf.size() != sys.n()) throw DimensionError("xf length does not match state dimension");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("horizon must be positive");
  }
  if (steps_per_unit_time < 1) throw std::invalid_argument("steps_per_unit_time must be >= 1");
  if (grid_cells(horizon, steps_per_unit_time) < 2) {
    throw std::invalid_argument("grid has fewer than 2 cells; increase horizon or density");
  }
}

std::size_t BoundaryProblem::grid_size() const {
  return grid_cells(horizon, steps_per_unit_time);
}

std::size_t controllability_rank(const LtiSystem& sys, std::optional<std::size_t> col) {
  if (!col) return rank_full_pivot(kalman_matrix(sys.a(), sys.b()));
  if (*col >= sys.m()) throw std::out_of_range("controllability_rank: column index out of range");
  return rank_full_pivot(kalman_matrix(sys.a(), sys.b().block(0, *col, sys.n(), 1)));
}

NormalityReport check_normality(const LtiSystem& sys) {
  NormalityReport report;
  for (std::size_t j = 0; j < sys.m(); ++j) {
    if (controllability_rank(sys, j) < sys.n()) {
      report.reasons.push_back("pair (A, b_" + std::to_string(j + 1) + ") not controllable");
    }
  }
  const double scale = std::max(1.0, std::pow(max_abs(sys.a()), static_cast<double>(sys.n())));
  if (std::abs(determinant(sys.a())) <= kDeterminantTolerance * scale) {
    report.reasons.emplace_back("A singular");
  }
  report.normal = report.reasons.empty();
  return report;
}

const char* to_string(Classification c) {
  switch (c) {
    case Classification::kTurnpikeCertified:
      return "turnpike-certified";
    case Classification::kExistenceOnly:
      return "existence-only";
    case Classification::kUncertified:
      return "uncertified";
  }
  return "uncertified";
}

StateTrajectory simulate(const LtiSystem& sys, const Vector& x0, const ControlTrajectory& u) {
  if (x0.size() != sys.n()) throw DimensionError("simulate: x0 length mismatch");
  require_control_shape(sys, u);
  const Discretization d = zoh_discretize(sys.a(), sys.b(), u.step);
  StateTrajectory x{u.step, {}};
  x.values.reserve(u.cells() + 1);
  x.values.push_back(x0);
  for (const Vector& uk : u.values) {
    x.values.push_back(d.ad * x.values.back() + d.bd * uk);
  }
  return x;
}

StateTrajectory simulate_dichotomic(const LtiSystem& sys, const SpectralSplit& split,
                                    const Vector& x0, const Vector& xf,
                                    const ControlTrajectory& u) {
  if (x0.size() != sys.n() || xf.size() != sys.n()) {
    throw DimensionError("simulate_dichotomic: endpoint length mismatch");
  }
  if (!split.hyperbolic) throw NonHyperbolicError("simulate_dichotomic: split not hyperbolic");
  require_control_shape(sys, u);
  const std::size_t cells = u.cells();
  const Discretization d = zoh_discretize(sys.a(), sys.b(), u.step);
  const Matrix ad_inv = mat_exp((-u.step) * sys.a());
  const Matrix stable_step = split.p_minus * d.ad;
  const Matrix stable_input = split.p_minus * d.bd;
  const Matrix back_step = split.p_plus * ad_inv;

  std::vector<Vector> stable(cells + 1);
  stable[0] = split.p_minus * x0;
  for (std::size_t k = 0; k < cells; ++k) {
    stable[k + 1] = stable_step * stable[k] + stable_input * u.values[k];
  }
  std::vector<Vector> antistable(cells + 1);
  antistable[cells] = split.p_plus * xf;
  for (std::size_t k = cells; k-- > 0;) {
    antistable[k] = back_step * (antistable[k + 1] - d.bd * u.values[k]);
  }

  StateTrajectory x{u.step, std::vector<Vector>(cells + 1)};
  for (std::size_t k = 0; k <= cells; ++k) x.values[k] = stable[k] + antistable[k];
  x.values[0] = x0;
  return x;
}

double dynamics_residual(const LtiSystem& sys, const StateTrajectory& x,
                         const ControlTrajectory& u) {
  require_control_shape(sys, u);
  if (x.values.size() != u.cells() + 1) {
    throw DimensionError("dynamics_residual: need one more state sample than control cells");
  }
  const Discretization d = zoh_discretize(sys.a(), sys.b(), u.step);
  double worst = 0.0;
  for (std::size_t k = 0; k < u.cells(); ++k) {
    const Vector r = x.values[k + 1] - d.ad * x.values[k] - d.bd * u.values[k];
    worst = std::max(worst, norm_inf(r));
  }
  return worst;
}

}  // namespace handsoff
