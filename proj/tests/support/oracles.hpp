#pragma once

// Independent reference implementations used only by the tests. They are
// deliberately naive so that they share no code path with the library.

#include <cstddef>
#include <random>

#include "handsoff/linalg.hpp"
#include "handsoff/lp_solver.hpp"

namespace handsoff::testing {

/// sum_{k < terms} A^k / k!
Matrix taylor_exp(const Matrix& a, int terms = 60);

Matrix triple_loop_mul(const Matrix& a, const Matrix& b);

/// x' = A x + B u with u held constant, classical RK4 with the given substep.
Vector rk4_propagate(const Matrix& a, const Matrix& b, const Vector& x0, const Vector& u,
                     double duration, double substep);

struct VertexOracle {
  bool feasible = false;
  double objective = 0.0;
};

/// Minimum of c^T x over every basic solution: each choice of r basic
/// columns and each lower/upper assignment of the rest. Bounds must be finite.
VertexOracle enumerate_vertices(const LpProblem& lp);

/// Numerical rank by modified Gram-Schmidt on the columns.
std::size_t gram_schmidt_rank(const Matrix& m, double rel_tol = 1e-9);

/// Kalman matrix [B, AB, ..., A^{n-1} B].
Matrix kalman_matrix(const Matrix& a, const Matrix& b);

// Seeded generators for property tests.
using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi);
Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, double lo = -1.0,
                     double hi = 1.0);
Vector random_vector(Rng& rng, std::size_t dim, double lo = -1.0, double hi = 1.0);
/// Random matrix rescaled so that its max-column-sum norm equals `norm`.
Matrix random_matrix_with_norm(Rng& rng, std::size_t n, double norm);
/// Diagonally dominant, hence well conditioned.
Matrix random_well_conditioned(Rng& rng, std::size_t n);

struct KnownSpectrum {
  Matrix a;
  Matrix v;  // eigenvector columns
  std::vector<double> eigenvalues;
  std::size_t stable_count = 0;
};
/// V diag(lambda) V^{-1} with real eigenvalues of magnitude in [0.3, 3].
KnownSpectrum random_hyperbolic(Rng& rng, std::size_t n);

/// Random LP with q variables, r rows and finite bounds. When `feasible`
/// the right-hand side comes from a point inside the box.
LpProblem random_bounded_lp(Rng& rng, std::size_t q, std::size_t r, bool feasible,
                            bool integer_data);

}  // namespace handsoff::testing
