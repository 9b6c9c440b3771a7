#include "handsoff/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

namespace handsoff {
namespace {

void require_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument(std::string(what) + " contains a non-finite entry");
    }
  }
}

void require_same_size(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw DimensionError("vector sizes differ: " + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
  }
}

void require_same_shape(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("matrix shapes differ");
  }
}

// LU factorization with partial pivoting, stored in place (unit lower part
// below the diagonal).
struct LuFactors {
  Matrix lu;
  std::vector<std::size_t> perm;
  int sign = 1;
};

LuFactors lu_factor(const Matrix& a) {
  if (!a.is_square()) {
    throw DimensionError("LU factorization needs a square matrix");
  }
  const std::size_t n = a.rows();
  LuFactors f{a, std::vector<std::size_t>(n), 1};
  std::iota(f.perm.begin(), f.perm.end(), std::size_t{0});
  Matrix& m = f.lu;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(m(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(m(i, k)) > best) {
        best = std::abs(m(i, k));
        p = i;
      }
    }
    if (best < kSingularPivot) {
      throw SingularMatrixError("pivot magnitude " + std::to_string(best) +
                                " below singularity threshold");
    }
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
      std::swap(f.perm[k], f.perm[p]);
      f.sign = -f.sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double l = m(i, k) / m(k, k);
      m(i, k) = l;
      if (l == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) m(i, j) -= l * m(k, j);
    }
  }
  return f;
}

void lu_solve_in_place(const LuFactors& f, std::span<double> x) {
  const std::size_t n = f.lu.rows();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = x[f.perm[i]];
  for (std::size_t i = 0; i < n; ++i) {
    double s = y[i];
    for (std::size_t j = 0; j < i; ++j) s -= f.lu(i, j) * y[j];
    y[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = y[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= f.lu(i, j) * y[j];
    y[i] = s / f.lu(i, i);
  }
  std::copy(y.begin(), y.end(), x.begin());
}

}  // namespace

// ---------------------------------------------------------------------------
// Vector

Vector::Vector(std::size_t dim, double fill) : data_(dim, fill) {
  require_finite(data_, "vector");
}

Vector::Vector(std::vector<double> entries) : data_(std::move(entries)) {
  require_finite(data_, "vector");
}

Vector::Vector(std::initializer_list<double> entries) : data_(entries) {
  require_finite(data_, "vector");
}

Vector& Vector::operator+=(const Vector& rhs) {
  require_same_size(*this, rhs);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
  return *this;
}

Vector& Vector::operator-=(const Vector& rhs) {
  require_same_size(*this, rhs);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
  return *this;
}

Vector& Vector::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Vector operator+(Vector lhs, const Vector& rhs) { return lhs += rhs; }
Vector operator-(Vector lhs, const Vector& rhs) { return lhs -= rhs; }
Vector operator-(Vector v) { return v *= -1.0; }
Vector operator*(double s, Vector v) { return v *= s; }

double dot(const Vector& a, const Vector& b) {
  require_same_size(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vector& v) {
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (double x : v) s += (x / scale) * (x / scale);
  return scale * std::sqrt(s);
}

double norm1(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

double norm_inf(const Vector& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

// ---------------------------------------------------------------------------
// Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols) {
    throw DimensionError("matrix needs " + std::to_string(rows * cols) + " entries, got " +
                         std::to_string(data_.size()));
  }
  require_finite(data_, "matrix");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionError("ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
  require_finite(data_, "matrix");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_columns(const std::vector<Vector>& columns) {
  if (columns.empty()) return {};
  Matrix m(columns.front().size(), columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) m.set_column(j, columns[j]);
  return m;
}

Vector Matrix::column(std::size_t j) const {
  Vector v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

void Matrix::set_column(std::size_t j, const Vector& v) {
  if (v.size() != rows_) throw DimensionError("column length mismatch");
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::block(std::size_t r0, std::size_t c0, std::size_t rows,
                     std::size_t cols) const {
  if (r0 + rows > rows_ || c0 + cols > cols_) throw DimensionError("block out of range");
  Matrix b(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
  return b;
}

Matrix& Matrix::operator+=(const Matrix& rhs) {
  require_same_shape(*this, rhs);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& rhs) {
  require_same_shape(*this, rhs);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Matrix operator+(Matrix lhs, const Matrix& rhs) { return lhs += rhs; }
Matrix operator-(Matrix lhs, const Matrix& rhs) { return lhs -= rhs; }
Matrix operator*(double s, Matrix m) { return m *= s; }
Matrix operator*(const Matrix& a, const Matrix& b) { return mat_mul(a, b); }
Vector operator*(const Matrix& a, const Vector& v) { return mat_vec(a, v); }

Matrix mat_mul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("mat_mul: " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " times " + std::to_string(b.rows()) +
                         "x" + std::to_string(b.cols()));
  }
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

Vector mat_vec(const Matrix& a, const Vector& v) {
  if (a.cols() != v.size()) throw DimensionError("mat_vec: shape mismatch");
  Vector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * v[j];
    y[i] = s;
  }
  return y;
}

double norm1(const Matrix& a) {
  double best = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += std::abs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

double max_abs(const Matrix& a) {
  double best = 0.0;
  for (double v : a.entries()) best = std::max(best, std::abs(v));
  return best;
}

Vector solve_linear(const Matrix& a, const Vector& rhs) {
  if (!a.is_square()) throw DimensionError("solve_linear: matrix is not square");
  if (rhs.size() != a.rows()) throw DimensionError("solve_linear: rhs length mismatch");
  const LuFactors f = lu_factor(a);
  Vector y = rhs;
  lu_solve_in_place(f, y.view());
  return y;
}

Matrix solve_linear(const Matrix& a, const Matrix& rhs) {
  if (!a.is_square()) throw DimensionError("solve_linear: matrix is not square");
  if (rhs.rows() != a.rows()) throw DimensionError("solve_linear: rhs rows mismatch");
  const LuFactors f = lu_factor(a);
  Matrix out(rhs.rows(), rhs.cols());
  for (std::size_t j = 0; j < rhs.cols(); ++j) {
    Vector col = rhs.column(j);
    lu_solve_in_place(f, col.view());
    out.set_column(j, col);
  }
  return out;
}

Matrix inverse(const Matrix& a) { return solve_linear(a, Matrix::identity(a.rows())); }

double determinant(const Matrix& a) {
  if (!a.is_square()) throw DimensionError("determinant: matrix is not square");
  LuFactors f;
  try {
    f = lu_factor(a);
  } catch (const SingularMatrixError&) {
    return 0.0;
  }
  double d = f.sign;
  for (std::size_t i = 0; i < a.rows(); ++i) d *= f.lu(i, i);
  return d;
}

Matrix mat_exp(const Matrix& a) {
  if (!a.is_square()) throw DimensionError("mat_exp: matrix is not square");
  const std::size_t n = a.rows();
  if (n == 0) return {};

  // Pade(13) coefficients.
  static constexpr std::array<double, 14> b = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
      1187353796428800.0,  129060195264000.0,   10559470521600.0,
      670442572800.0,      33522128640.0,       1323241920.0,
      40840800.0,          960960.0,            16380.0,
      182.0,               1.0};

  int squarings = 0;
  const double norm = norm1(a);
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Matrix as = std::ldexp(1.0, -squarings) * a;

  const Matrix id = Matrix::identity(n);
  const Matrix a2 = as * as;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;

  Matrix u_inner = b[13] * a6 + b[11] * a4 + b[9] * a2;
  u_inner = a6 * u_inner + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id;
  const Matrix u = as * u_inner;

  Matrix v = b[12] * a6 + b[10] * a4 + b[8] * a2;
  v = a6 * v + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;

  Matrix r = solve_linear(v - u, v + u);
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

Discretization zoh_discretize(const Matrix& sys_a, const Matrix& sys_b, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw std::invalid_argument("zoh_discretize: step must be positive");
  }
  if (!sys_a.is_square() || sys_b.rows() != sys_a.rows()) {
    throw DimensionError("zoh_discretize: A must be n x n and B must be n x m");
  }
  const std::size_t n = sys_a.rows();
  const std::size_t m = sys_b.cols();
  Matrix aug(n + m, n + m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = sys_a(i, j) * h;
    for (std::size_t j = 0; j < m; ++j) aug(i, n + j) = sys_b(i, j) * h;
  }
  const Matrix phi = mat_exp(aug);
  return {phi.block(0, 0, n, n), phi.block(0, n, n, m)};
}

}  // namespace handsoff
