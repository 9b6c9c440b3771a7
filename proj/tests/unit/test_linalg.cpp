#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "handsoff/errors.hpp"
#include "handsoff/linalg.hpp"
#include "oracles.hpp"

namespace handsoff {
namespace {

using testing::Rng;

double max_diff(const Matrix& a, const Matrix& b) { return max_abs(a - b); }

const Matrix kPlant{{1.0, 1.0}, {0.0, -1.0}};

TEST(Vector, RejectsNonFiniteEntries) {
  EXPECT_THROW(Vector({1.0, std::numeric_limits<double>::quiet_NaN()}), std::invalid_argument);
  EXPECT_THROW(Vector(2, std::numeric_limits<double>::infinity()), std::invalid_argument);
}

TEST(Matrix, RejectsBadShapeOrEntries) {
  EXPECT_THROW(Matrix(2, 2, std::vector<double>{1.0, 2.0, 3.0}), DimensionError);
  EXPECT_THROW(Matrix(1, 1, std::vector<double>{std::numeric_limits<double>::infinity()}),
               std::invalid_argument);
}

TEST(MatMul, IdentityLeavesMatrixUnchanged) {
  const Matrix m{{1.5, -2.0}, {0.25, 3.0}};
  EXPECT_EQ(mat_mul(Matrix::identity(2), m), m);
}

TEST(MatMul, PlantTimesInputMatrix) {
  const Matrix ab = mat_mul(kPlant, Matrix{{1.0}, {1.0}});
  EXPECT_EQ(ab, (Matrix{{2.0}, {-1.0}}));
}

TEST(MatMul, MatchesTripleLoop) {
  Rng rng(11);
  const Matrix a = testing::random_matrix(rng, 3, 4);
  const Matrix b = testing::random_matrix(rng, 4, 2);
  EXPECT_LE(max_diff(mat_mul(a, b), testing::triple_loop_mul(a, b)), 1e-14);
}

TEST(MatMul, DimensionMismatchThrows) {
  EXPECT_THROW((void)mat_mul(Matrix(2, 3), Matrix(2, 3)), DimensionError);
}

TEST(SolveLinear, Identity) {
  const Vector v{3.0, -1.0, 2.0};
  EXPECT_EQ(solve_linear(Matrix::identity(3), v), v);
}

TEST(SolveLinear, Diagonal) {
  const Vector y = solve_linear(Matrix{{2.0, 0.0}, {0.0, 4.0}}, Vector{2.0, 8.0});
  EXPECT_DOUBLE_EQ(y[0], 1.0);
  EXPECT_DOUBLE_EQ(y[1], 2.0);
}

TEST(SolveLinear, RandomResidual) {
  Rng rng(5);
  const Matrix a = testing::random_well_conditioned(rng, 5);
  const Vector rhs = testing::random_vector(rng, 5);
  EXPECT_LE(norm_inf(a * solve_linear(a, rhs) - rhs), 1e-10);
}

TEST(SolveLinear, SingularThrows) {
  EXPECT_THROW((void)solve_linear(Matrix{{1.0, 2.0}, {2.0, 4.0}}, Vector{1.0, 1.0}),
               SingularMatrixError);
  EXPECT_THROW((void)solve_linear(Matrix(2, 3), Vector{1.0, 1.0}), DimensionError);
}

TEST(Determinant, KnownValues) {
  EXPECT_DOUBLE_EQ(determinant(kPlant), -1.0);
  EXPECT_DOUBLE_EQ(determinant(Matrix{{0.0, 1.0}, {0.0, 0.0}}), 0.0);
}

TEST(MatExp, ZeroGivesIdentity) { EXPECT_EQ(mat_exp(Matrix(3, 3)), Matrix::identity(3)); }

TEST(MatExp, Diagonal) {
  const Matrix e = mat_exp(Matrix{{1.0, 0.0}, {0.0, -1.0}});
  EXPECT_NEAR(e(0, 0), std::exp(1.0), 1e-12);
  EXPECT_NEAR(e(1, 1), std::exp(-1.0), 1e-12);
  EXPECT_EQ(e(0, 1), 0.0);
  EXPECT_EQ(e(1, 0), 0.0);
}

TEST(MatExp, PlantMatchesTaylor) {
  EXPECT_LE(max_diff(mat_exp(kPlant), testing::taylor_exp(kPlant)), 1e-12);
}

TEST(MatExp, ClosedFormForPlant) {
  // e^{At} = [[e^t, sinh t], [0, e^{-t}]] for the plant above.
  const double t = 3.5;
  const Matrix e = mat_exp(t * kPlant);
  EXPECT_NEAR(e(0, 0) / std::exp(t), 1.0, 1e-13);
  EXPECT_NEAR(e(0, 1) / std::sinh(t), 1.0, 1e-13);
  EXPECT_NEAR(e(1, 1) / std::exp(-t), 1.0, 1e-13);
}

TEST(MatExp, LargeNormUsesSquaring) {
  const Matrix a{{-20.0, 0.0}, {0.0, 10.0}};
  const Matrix e = mat_exp(a);
  EXPECT_NEAR(e(0, 0) / std::exp(-20.0), 1.0, 1e-12);
  EXPECT_NEAR(e(1, 1) / std::exp(10.0), 1.0, 1e-12);
}

TEST(MatExp, NonSquareThrows) { EXPECT_THROW((void)mat_exp(Matrix(2, 3)), DimensionError); }

TEST(Zoh, Integrator) {
  const Discretization d = zoh_discretize(Matrix(2, 2), Matrix::identity(2), 0.5);
  EXPECT_LE(max_diff(d.ad, Matrix::identity(2)), 1e-15);
  EXPECT_LE(max_diff(d.bd, 0.5 * Matrix::identity(2)), 1e-15);
}

TEST(Zoh, ScalarClosedForm) {
  const Discretization d = zoh_discretize(Matrix{{-1.0}}, Matrix{{1.0}}, 1.0);
  EXPECT_NEAR(d.ad(0, 0), std::exp(-1.0), 1e-14);
  EXPECT_NEAR(d.bd(0, 0), 1.0 - std::exp(-1.0), 1e-14);
}

TEST(Zoh, PlantMatchesRungeKutta) {
  const Matrix b{{1.0}, {1.0}};
  const double h = 0.005;
  const Discretization d = zoh_discretize(kPlant, b, h);
  Vector x{1.0, -2.0};
  for (int k = 0; k < 400; ++k) {
    const Vector ref = testing::rk4_propagate(kPlant, b, x, Vector{0.0}, h, 1e-4);
    const Vector next = d.ad * x;
    ASSERT_LE(norm_inf(next - ref), 1e-8) << "step " << k;
    x = next;
  }
}

TEST(Zoh, ConstantInputMatchesRungeKutta) {
  const Matrix b{{1.0}, {1.0}};
  const Discretization d = zoh_discretize(kPlant, b, 0.25);
  const Vector x0{0.3, -0.7};
  const Vector u{-1.0};
  const Vector ref = testing::rk4_propagate(kPlant, b, x0, u, 0.25, 1e-4);
  EXPECT_LE(norm_inf(d.ad * x0 + d.bd * u - ref), 1e-12);
}

TEST(Zoh, NonPositiveStepThrows) {
  EXPECT_THROW((void)zoh_discretize(kPlant, Matrix{{1.0}, {1.0}}, 0.0), std::invalid_argument);
  EXPECT_THROW((void)zoh_discretize(kPlant, Matrix{{1.0}, {1.0}}, -1.0), std::invalid_argument);
}

}  // namespace
}  // namespace handsoff
