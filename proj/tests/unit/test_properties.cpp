// Randomized checks of algebraic identities. Every generator is seeded, so a
// failure reproduces exactly; the trial index is printed on failure.

#include <gtest/gtest.h>

#include "handsoff/lti_model.hpp"
#include "handsoff/spectral.hpp"
#include "oracles.hpp"

namespace handsoff {
namespace {

using testing::Rng;

constexpr int kTrials = 100;

TEST(Property, ExpTimesExpOfNegativeIsIdentity) {
  Rng rng(101);
  for (int t = 0; t < kTrials; ++t) {
    const std::size_t n = 1 + t % 6;
    const Matrix a = testing::random_matrix_with_norm(rng, n, testing::uniform(rng, 0.0, 2.0));
    EXPECT_LE(max_abs(mat_exp(a) * mat_exp(-1.0 * a) - Matrix::identity(n)), 1e-10) << t;
  }
}

TEST(Property, ExpSemigroup) {
  Rng rng(102);
  for (int t = 0; t < kTrials; ++t) {
    const std::size_t n = 1 + t % 6;
    const Matrix a = testing::random_matrix_with_norm(rng, n, 1.0);
    const double h1 = testing::uniform(rng, 0.0, 1.5);
    const double h2 = testing::uniform(rng, 0.0, 1.5);
    const Matrix lhs = mat_exp(h1 * a) * mat_exp(h2 * a);
    EXPECT_LE(max_abs(lhs - mat_exp((h1 + h2) * a)), 1e-10) << t;
  }
}

TEST(Property, ExpMatchesTaylorOracle) {
  Rng rng(103);
  for (int t = 0; t < kTrials; ++t) {
    const std::size_t n = 1 + t % 6;
    const Matrix a = testing::random_matrix_with_norm(rng, n, testing::uniform(rng, 0.0, 1.0));
    EXPECT_LE(max_abs(mat_exp(a) - testing::taylor_exp(a)), 1e-12) << t;
  }
}

TEST(Property, ZohHalfStepComposition) {
  Rng rng(104);
  for (int t = 0; t < kTrials; ++t) {
    const std::size_t n = 1 + t % 5;
    const std::size_t m = 1 + t % 3;
    const Matrix a = testing::random_matrix(rng, n, n, -2.0, 2.0);
    const Matrix b = testing::random_matrix(rng, n, m);
    const double h = testing::uniform(rng, 0.01, 1.0);
    const Discretization full = zoh_discretize(a, b, h);
    const Discretization half = zoh_discretize(a, b, 0.5 * h);
    EXPECT_LE(max_abs(full.ad - half.ad * half.ad), 1e-10) << t;
    EXPECT_LE(max_abs(full.bd - (half.ad * half.bd + half.bd)), 1e-10) << t;
  }
}

TEST(Property, SolveLinearResidual) {
  Rng rng(105);
  for (int t = 0; t < kTrials; ++t) {
    const std::size_t n = 1 + t % 10;
    const Matrix a = testing::random_well_conditioned(rng, n);
    const Vector rhs = testing::random_vector(rng, n, -100.0, 100.0);
    const Vector y = solve_linear(a, rhs);
    EXPECT_LE(norm_inf(a * y - rhs), 1e-10 * (1.0 + norm_inf(rhs))) << t;
  }
}

TEST(Property, StableDimensionAndProjectorIdentities) {
  Rng rng(106);
  for (int t = 0; t < kTrials; ++t) {
    const std::size_t n = 1 + t % 6;
    const testing::KnownSpectrum ks = testing::random_hyperbolic(rng, n);
    const SpectralSplit sp = spectral_split(ks.a);
    const Matrix id = Matrix::identity(n);
    EXPECT_EQ(sp.stable_dim, ks.stable_count) << t;
    EXPECT_LE(max_abs(sp.p_minus + sp.p_plus - id), 1e-8) << t;
    EXPECT_LE(max_abs(sp.p_minus * sp.p_minus - sp.p_minus), 1e-8) << t;
    EXPECT_LE(max_abs(sp.p_plus * sp.p_plus - sp.p_plus), 1e-8) << t;
    EXPECT_LE(max_abs(sp.p_minus * sp.p_plus), 1e-8) << t;
    EXPECT_LE(max_abs(ks.a * sp.p_minus - sp.p_minus * ks.a), 1e-8 * (1.0 + max_abs(ks.a))) << t;
    for (std::size_t j = 0; j < n; ++j) {
      const Vector v = ks.v.column(j);
      const Subspace where = ks.eigenvalues[j] < 0.0 ? Subspace::kStable : Subspace::kAntistable;
      const Subspace other = where == Subspace::kStable ? Subspace::kAntistable : Subspace::kStable;
      EXPECT_TRUE(subspace_membership(sp, v, where, 1e-8)) << t;
      EXPECT_FALSE(subspace_membership(sp, v, other, 1e-8)) << t;
    }
  }
}

TEST(Property, SimulateIsLinear) {
  Rng rng(107);
  for (int t = 0; t < kTrials; ++t) {
    const std::size_t n = 1 + t % 4;
    const std::size_t m = 1 + t % 2;
    const LtiSystem sys(testing::random_matrix(rng, n, n), testing::random_matrix(rng, n, m));
    const std::size_t cells = 50;
    ControlTrajectory u{0.05, {}};
    ControlTrajectory v{0.05, {}};
    ControlTrajectory mix{0.05, {}};
    const double alpha = testing::uniform(rng, -2.0, 2.0);
    const double beta = testing::uniform(rng, -2.0, 2.0);
    for (std::size_t k = 0; k < cells; ++k) {
      u.values.push_back(testing::random_vector(rng, m));
      v.values.push_back(testing::random_vector(rng, m));
      mix.values.push_back(alpha * u.values.back() + beta * v.values.back());
    }
    const Vector x0 = testing::random_vector(rng, n);
    const Vector y0 = testing::random_vector(rng, n);
    const StateTrajectory xu = simulate(sys, x0, u);
    const StateTrajectory yv = simulate(sys, y0, v);
    const StateTrajectory both = simulate(sys, alpha * x0 + beta * y0, mix);
    for (std::size_t k = 0; k <= cells; ++k) {
      ASSERT_LE(norm_inf(both.values[k] - (alpha * xu.values[k] + beta * yv.values[k])), 1e-9)
          << t << " " << k;
    }
  }
}

TEST(Property, ControllabilityRankIsSimilarityInvariant) {
  Rng rng(108);
  for (int t = 0; t < kTrials; ++t) {
    const std::size_t n = 2 + t % 4;
    Matrix a = testing::random_matrix(rng, n, n);
    Matrix b = testing::random_matrix(rng, n, 1);
    if (t % 2 == 0) {
      // Uncontrollable: block-triangular a with b confined to the first block.
      for (std::size_t i = 1; i < n; ++i) {
        a(i, 0) = 0.0;
        b(i, 0) = 0.0;
      }
    }
    const Matrix tr = testing::random_well_conditioned(rng, n);
    const LtiSystem original(a, b);
    const LtiSystem similar(tr * a * inverse(tr), tr * b);
    EXPECT_EQ(controllability_rank(original), controllability_rank(similar)) << t;
  }
}

}  // namespace
}  // namespace handsoff
