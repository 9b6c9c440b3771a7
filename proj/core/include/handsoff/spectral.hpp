#pragma once

// Stable/antistable invariant subspaces of a hyperbolic matrix, obtained
// from the matrix sign function rather than an eigendecomposition.

#include <cstddef>

#include "handsoff/linalg.hpp"

namespace handsoff {

struct SpectralSplit {
  Matrix p_minus;  // projector onto the stable subspace L-(A)
  Matrix p_plus;   // projector onto the antistable subspace L+(A)
  bool hyperbolic = false;
  std::size_t stable_dim = 0;
};

enum class Subspace { kStable, kAntistable };

inline constexpr double kMembershipTolerance = 1e-8;

/// sign(a) by the scaled Newton iteration S <- (mu S + (mu S)^{-1}) / 2.
/// Throws NonHyperbolicError if an iterate is singular or the iteration
/// has not converged after 100 steps.
[[nodiscard]] Matrix matrix_sign(const Matrix& a);

/// Projectors (I -/+ sign(a)) / 2. Throws NonHyperbolicError when a has
/// imaginary-axis spectrum.
[[nodiscard]] SpectralSplit spectral_split(const Matrix& a);

/// True iff ||(I - P) v|| <= tol (1 + ||v||) for the selected projector P.
[[nodiscard]] bool subspace_membership(const SpectralSplit& split, const Vector& v,
                                       Subspace which, double tol = kMembershipTolerance);

}  // namespace handsoff
