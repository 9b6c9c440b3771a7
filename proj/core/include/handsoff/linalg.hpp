#pragma once

// Dense real linear algebra for the small systems this library handles
// (state dimension up to ~10). Storage is row-major.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "handsoff/errors.hpp"

namespace handsoff {

class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t dim, double fill = 0.0);
  explicit Vector(std::vector<double> entries);
  Vector(std::initializer_list<double> entries);

  [[nodiscard]] std::size_t size() const { return data_.size(); }
  [[nodiscard]] bool empty() const { return data_.empty(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  [[nodiscard]] std::span<const double> view() const { return data_; }
  [[nodiscard]] std::span<double> view() { return data_; }
  [[nodiscard]] const std::vector<double>& entries() const { return data_; }

  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  Vector& operator+=(const Vector& rhs);
  Vector& operator-=(const Vector& rhs);
  Vector& operator*=(double s);

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> data_;
};

Vector operator+(Vector lhs, const Vector& rhs);
Vector operator-(Vector lhs, const Vector& rhs);
Vector operator-(Vector v);
Vector operator*(double s, Vector v);

[[nodiscard]] double dot(const Vector& a, const Vector& b);
[[nodiscard]] double norm2(const Vector& v);
[[nodiscard]] double norm1(const Vector& v);
[[nodiscard]] double norm_inf(const Vector& v);

class Matrix {
 public:
  Matrix() = default;
  /// Zero matrix.
  Matrix(std::size_t rows, std::size_t cols);
  /// Row-major entries; throws DimensionError on a length mismatch and
  /// std::invalid_argument on non-finite values.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix from_columns(const std::vector<Vector>& columns);

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }
  [[nodiscard]] bool is_square() const { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  [[nodiscard]] const std::vector<double>& entries() const { return data_; }
  [[nodiscard]] std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  [[nodiscard]] Vector column(std::size_t j) const;
  void set_column(std::size_t j, const Vector& v);

  [[nodiscard]] Matrix transposed() const;
  /// Copy of the rows x cols block whose top-left corner is (r0, c0).
  [[nodiscard]] Matrix block(std::size_t r0, std::size_t c0, std::size_t rows,
                             std::size_t cols) const;

  Matrix& operator+=(const Matrix& rhs);
  Matrix& operator-=(const Matrix& rhs);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix lhs, const Matrix& rhs);
Matrix operator-(Matrix lhs, const Matrix& rhs);
Matrix operator*(double s, Matrix m);
Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, const Vector& v);

/// Standard matrix product; throws DimensionError when a.cols != b.rows.
[[nodiscard]] Matrix mat_mul(const Matrix& a, const Matrix& b);
[[nodiscard]] Vector mat_vec(const Matrix& a, const Vector& v);

/// Induced 1-norm (maximum absolute column sum).
[[nodiscard]] double norm1(const Matrix& a);
[[nodiscard]] double max_abs(const Matrix& a);

inline constexpr double kSingularPivot = 1e-12;

/// Solves a*y = rhs by Gaussian elimination with partial pivoting.
/// Throws SingularMatrixError when a pivot magnitude drops below 1e-12.
[[nodiscard]] Vector solve_linear(const Matrix& a, const Vector& rhs);
/// Solves a*Y = rhs column by column with a single factorization.
[[nodiscard]] Matrix solve_linear(const Matrix& a, const Matrix& rhs);
[[nodiscard]] Matrix inverse(const Matrix& a);
[[nodiscard]] double determinant(const Matrix& a);

/// Matrix exponential by scaling and squaring with a degree-13 Pade
/// approximant; the argument is scaled until its 1-norm is at most 0.5.
[[nodiscard]] Matrix mat_exp(const Matrix& a);

struct Discretization {
  Matrix ad;  // e^{A h}
  Matrix bd;  // int_0^h e^{A s} B ds
};

/// Exact zero-order-hold discretization of x' = A x + B u with step h,
/// taken from the exponential of the augmented matrix [[A, B], [0, 0]] h.
[[nodiscard]] Discretization zoh_discretize(const Matrix& sys_a, const Matrix& sys_b,
                                            double h);

}  // namespace handsoff
