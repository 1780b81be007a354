#include "matrixopt/linalg.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "matrixopt/errors.hpp"

namespace matrixopt {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;

ConstMap view(const Matrix& m) {
  return ConstMap(m.data().data(), static_cast<Eigen::Index>(m.rows()),
                  static_cast<Eigen::Index>(m.cols()));
}

Matrix from_eigen(const RowMat& e) {
  Matrix out(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
  MutMap(out.data().data(), e.rows(), e.cols()) = e;
  return out;
}

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(what) + ": shape mismatch " + shape(a) +
                         " vs " + shape(b));
  }
}

void require_square(const Matrix& a, const char* what) {
  if (!a.is_square() || a.empty()) {
    throw DimensionError(std::string(what) + ": matrix must be square, got " + shape(a));
  }
}

void require_rhs(const Matrix& a, const Matrix& rhs, const char* what) {
  if (rhs.rows() != a.rows() || rhs.empty()) {
    throw DimensionError(std::string(what) + ": rhs has " + std::to_string(rhs.rows()) +
                         " rows, system has " + std::to_string(a.rows()));
  }
}

struct Lu {
  Eigen::PartialPivLU<RowMat> lu;
};

Lu factor_lu(const Matrix& a) {
  Lu f{Eigen::PartialPivLU<RowMat>(view(a))};
  const double scale = max_abs(a);
  const auto diag = f.lu.matrixLU().diagonal().cwiseAbs();
  if (scale == 0.0 || diag.minCoeff() < kSingularPivotTol * scale) {
    throw SingularMatrixError("lu: numerically singular pivot (|pivot| = " +
                              std::to_string(scale == 0.0 ? 0.0 : diag.minCoeff()) + ")");
  }
  return f;
}

// Returns false instead of throwing so SystemFactor can fall back quietly.
bool try_cholesky(const Matrix& a, Eigen::LLT<RowMat>& llt) {
  const double scale = max_abs(a);
  if (scale == 0.0) return false;
  llt.compute(view(a));
  if (llt.info() != Eigen::Success) return false;
  const auto d = llt.matrixLLT().diagonal();
  return (d.array() * d.array()).minCoeff() >= kSingularPivotTol * scale;
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, 0.0) {
  if (rows == 0 || cols == 0) {
    throw DimensionError("matrix dimensions must be positive");
  }
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (rows == 0 || cols == 0) {
    throw DimensionError("matrix dimensions must be positive");
  }
  if (entries_.size() != rows * cols) {
    throw DimensionError("matrix: expected " + std::to_string(rows * cols) +
                         " entries, got " + std::to_string(entries_.size()));
  }
  if (!all_finite()) throw NonFiniteError("matrix: non-finite entry");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  if (rows_ == 0 || cols_ == 0) throw DimensionError("matrix dimensions must be positive");
  entries_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionError("matrix: ragged initializer");
    entries_.insert(entries_.end(), r.begin(), r.end());
  }
  if (!all_finite()) throw NonFiniteError("matrix: non-finite entry");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  if (!m.all_finite()) throw NonFiniteError("matrix: non-finite entry");
  return m;
}

Matrix Matrix::column(std::span<const double> v) {
  return Matrix(v.size(), 1, std::vector<double>(v.begin(), v.end()));
}

double Matrix::at(std::size_t i, std::size_t j) const {
  if (i >= rows_ || j >= cols_) {
    throw DimensionError("matrix: index (" + std::to_string(i) + "," + std::to_string(j) +
                         ") out of range for " + shape(*this));
  }
  return (*this)(i, j);
}

Matrix Matrix::transpose() const {
  Matrix t;
  t.rows_ = cols_;
  t.cols_ = rows_;
  t.entries_.resize(entries_.size());
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t.entries_[j * rows_ + i] = entries_[i * cols_ + j];
  return t;
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](double v) { return std::isfinite(v); });
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_shape(*this, other, "operator+");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other.entries_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_shape(*this, other, "operator-");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= other.entries_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) noexcept {
  for (double& v : entries_) v *= s;
  return *this;
}

Matrix& Matrix::operator/=(double s) noexcept {
  for (double& v : entries_) v /= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator-(Matrix a) { return a *= -1.0; }
Matrix operator*(Matrix a, double s) { return a *= s; }
Matrix operator*(double s, Matrix a) { return a *= s; }
Matrix operator/(Matrix a, double s) { return a /= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("operator*: inner dimensions differ " + shape(a) + " * " + shape(b));
  }
  Matrix out(a.rows(), b.cols());
  MutMap(out.data().data(), static_cast<Eigen::Index>(a.rows()),
         static_cast<Eigen::Index>(b.cols()))
      .noalias() = view(a) * view(b);
  return out;
}

double frobenius_norm(const Matrix& m) {
  double s = 0.0;
  for (double v : m.data()) s += v * v;
  return std::sqrt(s);
}

double trace_inner(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "trace_inner");
  double s = 0.0;
  const auto x = a.data();
  const auto y = b.data();
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double max_abs(const Matrix& m) {
  double s = 0.0;
  for (double v : m.data()) s = std::max(s, std::abs(v));
  return s;
}

double norm_1(const Matrix& m) {
  double best = 0.0;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) s += std::abs(m(i, j));
    best = std::max(best, s);
  }
  return best;
}

double asymmetry(const Matrix& m) {
  require_square(m, "asymmetry");
  double s = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      const double d = m(i, j) - m(j, i);
      s += 2.0 * d * d;
    }
  return std::sqrt(s);
}

bool is_symmetric(const Matrix& m, double tol) {
  if (!m.is_square()) return false;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      if (std::abs(m(i, j) - m(j, i)) > tol) return false;
  return true;
}

Matrix symmetrize(const Matrix& m) {
  require_square(m, "symmetrize");
  Matrix s = m;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      s(i, j) = v;
      s(j, i) = v;
    }
  return s;
}

Matrix kron(const Matrix& a, const Matrix& b, std::size_t max_elements) {
  const std::size_t rows = a.rows() * b.rows();
  const std::size_t cols = a.cols() * b.cols();
  // Guard the product itself against overflow before comparing to the cap.
  if (rows != 0 && cols > max_elements / rows) {
    throw CapacityError("kron: output " + std::to_string(rows) + "x" + std::to_string(cols) +
                        " exceeds capacity of " + std::to_string(max_elements) + " entries");
  }
  Matrix out(rows, cols);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double s = a(i, j);
      if (s == 0.0) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = s * b(k, l);
    }
  return out;
}

Matrix vec(const Matrix& m) {
  Matrix v(m.rows() * m.cols(), 1);
  auto out = v.data();
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) out[j * m.rows() + i] = m(i, j);
  return v;
}

Matrix unvec(const Matrix& v, std::size_t rows, std::size_t cols) {
  if (v.cols() != 1 || v.rows() != rows * cols) {
    throw DimensionError("unvec: expected " + std::to_string(rows * cols) + "x1, got " +
                         shape(v));
  }
  Matrix m(rows, cols);
  const auto in = v.data();
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < rows; ++i) m(i, j) = in[j * rows + i];
  return m;
}

Matrix lu_solve(const Matrix& a, const Matrix& rhs) {
  require_square(a, "lu_solve");
  require_rhs(a, rhs, "lu_solve");
  const Lu f = factor_lu(a);
  return from_eigen(f.lu.solve(view(rhs)));
}

Matrix cholesky_solve(const Matrix& a, const Matrix& rhs) {
  require_square(a, "cholesky_solve");
  require_rhs(a, rhs, "cholesky_solve");
  if (!is_symmetric(a, 1e-10 * std::max(1.0, max_abs(a)))) {
    throw PreconditionError("cholesky_solve: matrix is not symmetric");
  }
  Eigen::LLT<RowMat> llt;
  if (!try_cholesky(a, llt)) {
    throw NotPositiveDefiniteError("cholesky_solve: non-positive pivot");
  }
  return from_eigen(llt.solve(view(rhs)));
}

Matrix pseudo_inverse(const Matrix& a, double rank_tol) {
  if (!(rank_tol > 0.0)) throw PreconditionError("pseudo_inverse: rank_tol must be positive");
  const RowMat e = view(a);
  Eigen::BDCSVD<RowMat> svd(e, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (smax > 0.0 && s(i) > rank_tol * smax) inv(i) = 1.0 / s(i);
  const RowMat p = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
  return from_eigen(p);
}

std::vector<double> symmetric_eigenvalues(const Matrix& a) {
  require_square(a, "symmetric_eigenvalues");
  Eigen::SelfAdjointEigenSolver<RowMat> es(view(a), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + ev.size());
}

double max_real_eigenvalue(const Matrix& a) {
  require_square(a, "max_real_eigenvalue");
  Eigen::EigenSolver<RowMat> es(view(a), false);
  if (es.info() != Eigen::Success) throw Error("max_real_eigenvalue: eigensolver failed");
  return es.eigenvalues().real().maxCoeff();
}

struct SystemFactor::Impl {
  std::size_t n = 0;
  bool cholesky = false;
  Eigen::LLT<RowMat> llt;
  Eigen::PartialPivLU<RowMat> lu;
  Eigen::PartialPivLU<RowMat> lu_t;
};

SystemFactor::SystemFactor(const Matrix& a) {
  require_square(a, "SystemFactor");
  auto impl = std::make_shared<Impl>();
  impl->n = a.rows();
  if (is_symmetric(a, 1e-10 * std::max(1.0, max_abs(a))) && try_cholesky(a, impl->llt)) {
    impl->cholesky = true;
  } else {
    impl->lu = factor_lu(a).lu;
    impl->lu_t = factor_lu(a.transpose()).lu;
  }
  impl_ = std::move(impl);
}

Matrix SystemFactor::solve(const Matrix& rhs) const {
  if (rhs.rows() != impl_->n) throw DimensionError("SystemFactor::solve: rhs rows mismatch");
  if (impl_->cholesky) return from_eigen(impl_->llt.solve(view(rhs)));
  return from_eigen(impl_->lu.solve(view(rhs)));
}

Matrix SystemFactor::solve_right(const Matrix& rhs) const {
  if (rhs.cols() != impl_->n) {
    throw DimensionError("SystemFactor::solve_right: rhs cols mismatch");
  }
  const RowMat rt = view(rhs).transpose();
  if (impl_->cholesky) return from_eigen(impl_->llt.solve(rt).transpose());
  return from_eigen(impl_->lu_t.solve(rt).transpose());
}

bool SystemFactor::used_cholesky() const noexcept { return impl_->cholesky; }
std::size_t SystemFactor::order() const noexcept { return impl_->n; }

}  // namespace matrixopt
