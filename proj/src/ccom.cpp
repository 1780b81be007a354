#include "matrixopt/ccom.hpp"

#include <algorithm>
#include <cmath>

#include "matrixopt/errors.hpp"
#include "matrixopt/sylvester.hpp"

namespace matrixopt {
namespace {

// d_inv for groups of g consecutive entries of a column vector.
std::vector<double> inverse_weights(const Matrix& x, std::size_t g, double floor) {
  const std::size_t t = x.rows();
  std::vector<double> d_inv(t);
  const auto v = x.data();
  for (std::size_t start = 0; start < t; start += g) {
    double s = 0.0;
    for (std::size_t i = start; i < start + g; ++i) s += v[i] * v[i];
    const double w = 2.0 * std::max(std::sqrt(s), floor);
    for (std::size_t i = start; i < start + g; ++i) d_inv[i] = w;
  }
  return d_inv;
}

double feasibility(const Matrix& m_sys, const Matrix& x, const Matrix& c) {
  return frobenius_norm(m_sys * x - c);
}

}  // namespace

void CcomConfig::validate() const {
  if (!(epsilon > 0.0)) throw PreconditionError("ccom: epsilon must be positive");
  if (!(row_norm_floor > 0.0)) throw PreconditionError("ccom: row_norm_floor must be positive");
  if (max_iterations < 0) throw PreconditionError("ccom: max_iterations must be >= 0");
  if (group_rows == 0) throw PreconditionError("ccom: group_rows must be positive");
}

double l21_norm(const Matrix& m) {
  double total = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * m(i, j);
    total += std::sqrt(s);
  }
  return total;
}

double grouped_l21(const Matrix& x, std::size_t group_rows) {
  if (x.cols() != 1 || group_rows == 0 || x.rows() % group_rows != 0) {
    throw DimensionError("grouped_l21: column vector length must be a multiple of the group size");
  }
  double total = 0.0;
  const auto v = x.data();
  for (std::size_t start = 0; start < x.rows(); start += group_rows) {
    double s = 0.0;
    for (std::size_t i = start; i < start + group_rows; ++i) s += v[i] * v[i];
    total += std::sqrt(s);
  }
  return total;
}

Matrix reweight_diagonal(const Matrix& x, double floor) {
  if (!(floor > 0.0)) throw PreconditionError("reweight_diagonal: floor must be positive");
  Matrix d(x.rows(), x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) s += x(i, j) * x(i, j);
    d(i, i) = 1.0 / (2.0 * std::max(std::sqrt(s), floor));
  }
  return d;
}

Matrix ccom_step_weights(const Matrix& m_sys, const Matrix& c_vec, std::span<const double> d_inv) {
  const std::size_t s = m_sys.rows();
  const std::size_t t = m_sys.cols();
  if (c_vec.rows() != s || c_vec.cols() != 1) throw DimensionError("ccom_step: c must be s x 1");
  if (d_inv.size() != t) throw DimensionError("ccom_step: weight count must equal M.cols");
  // M D^{-1}
  Matrix md = m_sys;
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < t; ++j) md(i, j) *= d_inv[j];
  const Matrix sys = symmetrize(md * m_sys.transpose());
  const Matrix y = SystemFactor(sys).solve(c_vec);
  return md.transpose() * y;
}

Matrix ccom_step(const Matrix& m_sys, const Matrix& c_vec, const Matrix& d) {
  if (!d.is_square() || d.rows() != m_sys.cols()) {
    throw DimensionError("ccom_step: D must be t x t with t = M.cols");
  }
  std::vector<double> d_inv(d.rows());
  for (std::size_t i = 0; i < d.rows(); ++i) {
    for (std::size_t j = 0; j < d.cols(); ++j) {
      if (i != j && d(i, j) != 0.0) throw PreconditionError("ccom_step: D must be diagonal");
    }
    if (!(d(i, i) > 0.0)) throw PreconditionError("ccom_step: D must be positive");
    d_inv[i] = 1.0 / d(i, i);
  }
  return ccom_step_weights(m_sys, c_vec, d_inv);
}

std::vector<Matrix> ccom_iterates(const Matrix& m_sys, const Matrix& c_vec, long count,
                                  std::size_t group_rows, double floor) {
  if (group_rows == 0 || m_sys.cols() % group_rows != 0) {
    throw PreconditionError("ccom: group_rows must divide the unknown count");
  }
  std::vector<Matrix> out;
  std::vector<double> d_inv(m_sys.cols(), 1.0);
  for (long k = 0; k < count; ++k) {
    out.push_back(ccom_step_weights(m_sys, c_vec, d_inv));
    d_inv = inverse_weights(out.back(), group_rows, floor);
  }
  return out;
}

SolveReport solve_ccom(const SylvesterProblem& p, const CcomConfig& cfg) {
  cfg.validate();
  Stopwatch clock;
  const std::size_t mn = p.m() * p.n();
  if (mn % cfg.group_rows != 0) {
    throw PreconditionError("ccom: group_rows must divide m*n");
  }
  const Matrix m_sys = sylvester_kronecker_matrix(p, cfg.kron_capacity);
  const Matrix c_vec = vec(p.c);

  SolveReport rep;
  rep.solution = Matrix(p.m(), p.n());
  rep.residual_history.push_back(frobenius_norm(p.c));
  auto& objective = rep.detail.series["l21_objective"];
  auto& feas = rep.detail.series["feasibility"];
  double violations = 0.0;

  std::vector<double> d_inv(mn, 1.0);
  rep.termination = Termination::max_iterations;
  if (rep.residual_history.back() <= cfg.epsilon) rep.termination = Termination::converged;
  for (long k = 1; k <= cfg.max_iterations && rep.termination != Termination::converged; ++k) {
    const Matrix x = ccom_step_weights(m_sys, c_vec, d_inv);
    rep.solution = unvec(x, p.m(), p.n());
    rep.iterations = k;
    const double r = sylvester_residual(p, rep.solution);
    rep.residual_history.push_back(r);
    const double obj = grouped_l21(x, cfg.group_rows);
    if (!objective.empty() && obj > objective.back() + 1e-10) violations += 1.0;
    objective.push_back(obj);
    feas.push_back(feasibility(m_sys, x, c_vec));
    if (!std::isfinite(r)) {
      rep.termination = Termination::error;
      break;
    }
    if (r <= cfg.epsilon) rep.termination = Termination::converged;
    d_inv = inverse_weights(x, cfg.group_rows, cfg.row_norm_floor);
  }
  rep.detail.scalars["l21_increase_violations"] = violations;
  rep.final_residual = rep.residual_history.back();
  rep.wall_time_seconds = clock.seconds();
  return rep;
}

}  // namespace matrixopt
