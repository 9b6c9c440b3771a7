#include "handsoff/spectral.hpp"

#include <cmath>
#include <string>

namespace handsoff {
namespace {

constexpr int kMaxSignIterations = 100;
constexpr double kSignTolerance = 1e-12;

}  // namespace

Matrix matrix_sign(const Matrix& a) {
  if (!a.is_square()) throw DimensionError("matrix_sign: matrix is not square");
  const std::size_t n = a.rows();
  if (n == 0) return {};

  Matrix s = a;
  bool scale = true;
  for (int iter = 0; iter < kMaxSignIterations; ++iter) {
    Matrix s_inv;
    double det = 0.0;
    try {
      s_inv = inverse(s);
      det = determinant(s);
    } catch (const SingularMatrixError&) {
      throw NonHyperbolicError("matrix_sign: singular iterate (eigenvalue on the imaginary axis)");
    }
    // Determinant scaling speeds up the early iterations; once the iterate
    // is close to an involution it is switched off so that the quadratic
    // convergence is not disturbed.
    double mu = 1.0;
    if (scale && det != 0.0) mu = std::pow(std::abs(det), -1.0 / static_cast<double>(n));
    Matrix next = 0.5 * (mu * s + (1.0 / mu) * s_inv);
    const double change = norm1(next - s);
    const double size = norm1(s);
    if (!std::isfinite(change)) break;
    if (change <= kSignTolerance * size) return next;
    if (change <= 1e-2 * size) scale = false;
    s = std::move(next);
  }
  throw NonHyperbolicError("matrix_sign: no convergence after " +
                           std::to_string(kMaxSignIterations) +
                           " iterations (eigenvalue on or near the imaginary axis)");
}

SpectralSplit spectral_split(const Matrix& a) {
  const Matrix sign = matrix_sign(a);
  const std::size_t n = a.rows();
  const Matrix id = Matrix::identity(n);
  SpectralSplit split;
  split.p_minus = 0.5 * (id - sign);
  split.p_plus = 0.5 * (id + sign);
  split.hyperbolic = true;
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) trace += split.p_minus(i, i);
  split.stable_dim = static_cast<std::size_t>(std::lround(trace));
  return split;
}

bool subspace_membership(const SpectralSplit& split, const Vector& v, Subspace which,
                         double tol) {
  if (!split.hyperbolic) {
    throw NonHyperbolicError("subspace_membership: split is not hyperbolic");
  }
  const Matrix& p = which == Subspace::kStable ? split.p_minus : split.p_plus;
  if (p.cols() != v.size()) throw DimensionError("subspace_membership: dimension mismatch");
  const Vector residual = v - p * v;
  return norm2(residual) <= tol * (1.0 + norm2(v));
}

}  // namespace handsoff
