#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace asdep {

using Vector = std::vector<double>;

// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  // Throws InvalidInput when rows * cols != entries.size().
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> diag);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }
  bool is_square() const { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  Vector column(std::size_t j) const;

  std::span<const double> entries() const { return data_; }
  std::span<double> entries() { return data_; }

  bool all_finite() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const double> x);

Matrix transpose(const Matrix& a);
// Hadamard product.
Matrix elementwise(const Matrix& a, const Matrix& b);
double max_abs(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
// Adds s * a * b^T to m.
void add_outer(Matrix& m, std::span<const double> a, std::span<const double> b, double s = 1.0);

// Symmetric matrix. Construction verifies
// |S(i,j) - S(j,i)| <= 1e-12 * max(1, |S(i,j)|) and finiteness.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(Matrix m);
  SymmetricMatrix(std::initializer_list<std::initializer_list<double>> rows);

  // Returns (m + m^T) / 2 without the symmetry check.
  static SymmetricMatrix symmetrized(const Matrix& m);
  static SymmetricMatrix identity(std::size_t n);
  static SymmetricMatrix zero(std::size_t n);

  std::size_t dim() const { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const Matrix& matrix() const { return m_; }
  Vector diagonal() const;

 private:
  Matrix m_;
};

// Eigenvalues descending; eigenvectors are the matching columns.
struct Spectrum {
  Vector eigenvalues;
  Matrix eigenvectors;

  std::size_t dim() const { return eigenvalues.size(); }
  Vector eigenvector(std::size_t k) const { return eigenvectors.column(k); }
};

// Cyclic Jacobi eigendecomposition. Each eigenvector has its first entry
// with magnitude above 1e-12 made positive. Throws InvalidInput on
// non-finite input.
Spectrum sym_eig(const SymmetricMatrix& s);

// Eigenvalues with |lambda| <= tol * max|lambda| map to zero, others to
// 1 / lambda. The zero matrix maps to itself.
SymmetricMatrix pseudo_inverse(const SymmetricMatrix& s, double tol = 1e-12);

double trace(const SymmetricMatrix& s);
double trace(const Matrix& m);

// Lower-triangular L with L L^T = s. Throws NumericError unless s is
// positive definite.
Matrix cholesky(const SymmetricMatrix& s);
// Solves L x = b for lower-triangular L.
Vector solve_lower(const Matrix& lower, std::span<const double> b);
// Gaussian elimination with partial pivoting. Throws NumericError when a
// pivot underflows.
Vector solve(Matrix a, Vector b);

// Orthonormalizes the columns of a square full-rank matrix (modified
// Gram-Schmidt, twice for stability).
Matrix orthonormalize_columns(const Matrix& a);

// Projector V V^T onto the span of the given columns of v.
Matrix column_projector(const Matrix& v, std::size_t first, std::size_t count);

}  // namespace asdep
