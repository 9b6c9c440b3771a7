#include <gtest/gtest.h>

#include "handsoff/errors.hpp"
#include "handsoff/spectral.hpp"

namespace handsoff {
namespace {

const Matrix kPlant{{1.0, 1.0}, {0.0, -1.0}};

TEST(MatrixSign, Diagonal) {
  const Matrix s = matrix_sign(Matrix{{2.0, 0.0}, {0.0, -3.0}});
  EXPECT_LE(max_abs(s - Matrix{{1.0, 0.0}, {0.0, -1.0}}), 1e-14);
}

TEST(MatrixSign, PlantSquaresToIdentityAndCommutes) {
  const Matrix s = matrix_sign(kPlant);
  EXPECT_LE(max_abs(s * s - Matrix::identity(2)), 1e-10);
  EXPECT_LE(max_abs(kPlant * s - s * kPlant), 1e-10);
  // The plant's sign happens to be the plant itself.
  EXPECT_LE(max_abs(s - kPlant), 1e-12);
}

TEST(MatrixSign, NilpotentIsNotHyperbolic) {
  EXPECT_THROW((void)matrix_sign(Matrix{{0.0, 1.0}, {0.0, 0.0}}), NonHyperbolicError);
}

TEST(SpectralSplit, HurwitzIsAllStable) {
  const SpectralSplit sp = spectral_split(Matrix{{-1.0, 0.0}, {0.0, -2.0}});
  EXPECT_TRUE(sp.hyperbolic);
  EXPECT_EQ(sp.stable_dim, 2U);
  EXPECT_LE(max_abs(sp.p_minus - Matrix::identity(2)), 1e-14);
  EXPECT_LE(max_abs(sp.p_plus), 1e-14);
}

TEST(SpectralSplit, PlantSubspacesAreTheExpectedLines) {
  const SpectralSplit sp = spectral_split(kPlant);
  EXPECT_EQ(sp.stable_dim, 1U);
  // Range of P- is the line 2 x1 + x2 = 0, range of P+ is x2 = 0.
  for (std::size_t j = 0; j < 2; ++j) {
    const Vector cm = sp.p_minus.column(j);
    const Vector cp = sp.p_plus.column(j);
    EXPECT_LE(std::abs(2.0 * cm[0] + cm[1]), 1e-8);
    EXPECT_LE(std::abs(cp[1]), 1e-8);
  }
  EXPECT_GT(norm2(sp.p_minus * Vector{1.0, -2.0}), 1.0);
  EXPECT_GT(norm2(sp.p_plus * Vector{1.0, 0.0}), 0.5);
}

TEST(SpectralSplit, RotationIsNotHyperbolic) {
  EXPECT_THROW((void)spectral_split(Matrix{{0.0, -1.0}, {1.0, 0.0}}), NonHyperbolicError);
}

TEST(SubspaceMembership, PlantEndpoints) {
  const SpectralSplit sp = spectral_split(kPlant);
  EXPECT_TRUE(subspace_membership(sp, Vector{1.0, -2.0}, Subspace::kStable));
  EXPECT_FALSE(subspace_membership(sp, Vector{1.0, 0.0}, Subspace::kStable));
  EXPECT_TRUE(subspace_membership(sp, Vector{1.0, 0.0}, Subspace::kAntistable));
  EXPECT_FALSE(subspace_membership(sp, Vector{1.0, -2.0}, Subspace::kAntistable));
}

TEST(SubspaceMembership, ZeroVectorIsInBoth) {
  const SpectralSplit sp = spectral_split(kPlant);
  EXPECT_TRUE(subspace_membership(sp, Vector(2), Subspace::kStable));
  EXPECT_TRUE(subspace_membership(sp, Vector(2), Subspace::kAntistable));
}

TEST(SubspaceMembership, NonHyperbolicSplitThrows) {
  SpectralSplit sp;
  sp.p_minus = Matrix::identity(2);
  sp.p_plus = Matrix(2, 2);
  sp.hyperbolic = false;
  EXPECT_THROW((void)subspace_membership(sp, Vector(2), Subspace::kStable), NonHyperbolicError);
}

}  // namespace
}  // namespace handsoff
