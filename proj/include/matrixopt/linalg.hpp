#pragma once

#include <cstddef>
#include <initializer_list>
#include <memory>
#include <span>
#include <vector>

namespace matrixopt {

// 4096 x 4096 output entries.
inline constexpr std::size_t kDefaultKronCapacity = std::size_t{4096} * 4096;
inline constexpr double kDefaultRankTol = 1e-12;
inline constexpr double kSingularPivotTol = 1e-14;

/// Dense real matrix with row-major storage. Vectors are 1-column matrices.
/// A default-constructed Matrix is an empty 0x0 placeholder; every other
/// constructor requires positive dimensions and finite entries.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }
  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);
  static Matrix column(std::span<const double> v);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  bool is_square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
  double at(std::size_t i, std::size_t j) const;

  std::span<double> data() noexcept { return entries_; }
  std::span<const double> data() const noexcept { return entries_; }

  Matrix transpose() const;
  bool all_finite() const noexcept;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s) noexcept;
  Matrix& operator/=(double s) noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator-(Matrix a);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);
Matrix operator/(Matrix a, double s);
Matrix operator*(const Matrix& a, const Matrix& b);

double frobenius_norm(const Matrix& m);
double trace_inner(const Matrix& a, const Matrix& b);
double max_abs(const Matrix& m);
/// Maximum absolute column sum.
double norm_1(const Matrix& m);
/// Frobenius norm of m - m^T.
double asymmetry(const Matrix& m);
bool is_symmetric(const Matrix& m, double tol);
Matrix symmetrize(const Matrix& m);

Matrix kron(const Matrix& a, const Matrix& b,
            std::size_t max_elements = kDefaultKronCapacity);

/// Column-stacking vectorization: vec([[1,2],[3,4]]) = [1,3,2,4]^T.
Matrix vec(const Matrix& m);
Matrix unvec(const Matrix& v, std::size_t rows, std::size_t cols);

Matrix lu_solve(const Matrix& a, const Matrix& rhs);
Matrix cholesky_solve(const Matrix& a, const Matrix& rhs);
Matrix pseudo_inverse(const Matrix& a, double rank_tol = kDefaultRankTol);
std::vector<double> symmetric_eigenvalues(const Matrix& a);
/// Largest real part over the (general, possibly complex) eigenvalues.
double max_real_eigenvalue(const Matrix& a);

/// Factorization of a square system, reused across right-hand sides.
/// Cholesky is tried first; LU with partial pivoting takes over when the
/// matrix is not numerically positive definite.
class SystemFactor {
 public:
  explicit SystemFactor(const Matrix& a);

  /// a^{-1} rhs
  Matrix solve(const Matrix& rhs) const;
  /// rhs a^{-1}
  Matrix solve_right(const Matrix& rhs) const;
  bool used_cholesky() const noexcept;
  std::size_t order() const noexcept;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

}  // namespace matrixopt
