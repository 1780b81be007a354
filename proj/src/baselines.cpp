#include "matrixopt/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "matrixopt/errors.hpp"
#include "matrixopt/sylvester.hpp"

namespace matrixopt {
namespace {

Matrix start_iterate(const SylvesterProblem& p, const std::optional<Matrix>& x0) {
  if (!x0) return Matrix(p.m(), p.n());
  if (x0->rows() != p.m() || x0->cols() != p.n()) throw DimensionError("x0 must be m x n");
  return *x0;
}

void check_care_iterate(const CareProblem& p, const Matrix& x) {
  if (x.rows() != p.n() || x.cols() != p.n()) {
    throw DimensionError("CARE iterate must be " + std::to_string(p.n()) + "x" +
                         std::to_string(p.n()));
  }
}

}  // namespace

void BaselineConfig::validate() const {
  if (!(tol > 0.0)) throw PreconditionError("baseline: tol must be positive");
  if (max_iterations < 0) throw PreconditionError("baseline: max_iterations must be >= 0");
  if (richardson_omega && !(*richardson_omega > 0.0)) {
    throw PreconditionError("baseline: richardson_omega must be positive");
  }
}

SolveReport solve_cg(const SylvesterProblem& p, const BaselineConfig& cfg,
                     const std::optional<Matrix>& x0) {
  cfg.validate();
  Stopwatch clock;
  for (const Matrix* m : {&p.a, &p.b}) {
    if (!is_symmetric(*m, 1e-12 * std::max(1.0, max_abs(*m)))) {
      throw PreconditionError("cg: A and B must be symmetric positive definite");
    }
  }
  SolveReport rep;
  Matrix x = start_iterate(p, x0);
  Matrix r = p.c - sylvester_apply(p, x);
  double rr = trace_inner(r, r);
  rep.residual_history.push_back(std::sqrt(rr));
  Matrix dir = r;
  auto finish = [&](Termination t) {
    rep.termination = t;
    rep.solution = x;
    rep.final_residual = rep.residual_history.back();
    rep.wall_time_seconds = clock.seconds();
  };
  while (true) {
    if (std::sqrt(rr) <= cfg.tol) {
      finish(Termination::converged);
      return rep;
    }
    if (rep.iterations >= cfg.max_iterations) {
      finish(Termination::max_iterations);
      return rep;
    }
    if (cfg.on_cg_direction) cfg.on_cg_direction(dir);
    const Matrix ld = sylvester_apply(p, dir);
    const double curv = trace_inner(dir, ld);
    if (!(curv > 0.0)) {
      finish(Termination::error);
      throw SolveFailure("cg-breakdown", "cg: non-positive curvature along a search direction",
                         rep);
    }
    const double alpha = rr / curv;
    x += alpha * dir;
    r -= alpha * ld;
    const double rr_new = trace_inner(r, r);
    rep.iterations += 1;
    rep.residual_history.push_back(std::sqrt(rr_new));
    dir *= rr_new / rr;
    dir += r;
    rr = rr_new;
  }
}

SolveReport solve_anderson_richardson(const SylvesterProblem& p, const BaselineConfig& cfg,
                                      const std::optional<Matrix>& x0) {
  cfg.validate();
  Stopwatch clock;
  const double omega = cfg.richardson_omega.value_or(1.0 / (norm_1(p.a) + norm_1(p.b)));
  SolveReport rep;
  rep.detail.scalars["omega"] = omega;
  Matrix x = start_iterate(p, x0);
  Matrix f = -omega * sylvester_residual_matrix(p, x);
  const double r0 = frobenius_norm(f) / omega;
  rep.residual_history.push_back(r0);
  Matrix x_prev, f_prev;
  auto finish = [&](Termination t) {
    rep.termination = t;
    rep.solution = x;
    rep.final_residual = rep.residual_history.back();
    rep.wall_time_seconds = clock.seconds();
    return rep;
  };
  while (true) {
    const double r = rep.residual_history.back();
    if (!std::isfinite(r) || r > 1e6 * r0) return finish(Termination::diverged);
    if (r <= cfg.tol) return finish(Termination::converged);
    if (rep.iterations >= cfg.max_iterations) return finish(Termination::max_iterations);
    Matrix x_next = x + f;
    if (!f_prev.empty()) {
      const Matrix df = f - f_prev;
      const double dd = trace_inner(df, df);
      if (dd > 0.0) {
        const double theta = trace_inner(f, df) / dd;
        x_next -= theta * ((x - x_prev) + df);
      }
    }
    x_prev = std::move(x);
    f_prev = std::move(f);
    x = std::move(x_next);
    f = -omega * sylvester_residual_matrix(p, x);
    rep.iterations += 1;
    rep.residual_history.push_back(frobenius_norm(f) / omega);
  }
}

Matrix care_residual_matrix(const CareProblem& p, const Matrix& x) {
  check_care_iterate(p, x);
  Matrix r = p.a.transpose() * x;
  r += x * p.a;
  r -= x * p.n_mat * x;
  r += p.k_mat;
  return r;
}

double care_residual(const CareProblem& p, const Matrix& x) {
  return frobenius_norm(care_residual_matrix(p, x));
}

Matrix lyapunov_residual_matrix(const LyapunovProblem& p, const Matrix& x) {
  if (x.rows() != p.n() || x.cols() != p.n()) throw DimensionError("Lyapunov iterate shape");
  Matrix r = p.a.transpose() * x;
  r += x * p.a;
  r += p.q;
  return r;
}

double lyapunov_residual(const LyapunovProblem& p, const Matrix& x) {
  return frobenius_norm(lyapunov_residual_matrix(p, x));
}

Matrix solve_lyapunov_direct(const LyapunovProblem& p, std::size_t max_elements) {
  const std::size_t n = p.n();
  if (n * n > max_elements / (n * n)) {
    throw CapacityError("Lyapunov Kronecker system of order " + std::to_string(n * n) +
                        " exceeds capacity");
  }
  const Matrix at = p.a.transpose();
  Matrix m = kron(Matrix::identity(n), at, max_elements);
  m += kron(at, Matrix::identity(n), max_elements);
  try {
    return symmetrize(unvec(lu_solve(m, -vec(p.q)), n, n));
  } catch (const SingularMatrixError& e) {
    throw SingularMatrixError(std::string("Lyapunov operator is singular (eigenvalues of A "
                                          "sum to zero): ") + e.what());
  }
}

SolveReport solve_newton_care(const CareProblem& p, const Matrix& x0, const BaselineConfig& cfg) {
  cfg.validate();
  Stopwatch clock;
  check_care_iterate(p, x0);
  if (!is_symmetric(x0, 1e-12 * std::max(1.0, max_abs(x0)))) {
    throw PreconditionError("newton: x0 must be symmetric");
  }
  SolveReport rep;
  Matrix x = x0;
  rep.residual_history.push_back(care_residual(p, x));
  if (cfg.record_trajectory) rep.trajectory.push_back(x);
  auto finish = [&](Termination t) {
    rep.termination = t;
    rep.solution = x;
    rep.final_residual = rep.residual_history.back();
    rep.wall_time_seconds = clock.seconds();
  };
  while (true) {
    const double r = rep.residual_history.back();
    if (!std::isfinite(r)) {
      finish(Termination::diverged);
      return rep;
    }
    if (r <= cfg.tol) {
      finish(Termination::converged);
      return rep;
    }
    if (rep.iterations >= cfg.max_iterations) {
      finish(Termination::max_iterations);
      return rep;
    }
    const Matrix nx = p.n_mat * x;
    Matrix ak = p.a - nx;
    Matrix qk = symmetrize(x * nx + p.k_mat);
    try {
      x = solve_lyapunov_direct(LyapunovProblem(std::move(ak), std::move(qk)), cfg.kron_capacity);
    } catch (const SingularMatrixError& e) {
      finish(Termination::error);
      throw SolveFailure("newton-breakdown", e.what(), rep);
    }
    rep.iterations += 1;
    rep.residual_history.push_back(care_residual(p, x));
    if (cfg.record_trajectory) rep.trajectory.push_back(x);
  }
}

}  // namespace matrixopt
