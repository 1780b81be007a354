#pragma once

#include <functional>
#include <optional>

#include "matrixopt/linalg.hpp"
#include "matrixopt/problems.hpp"
#include "matrixopt/report.hpp"

namespace matrixopt {

struct BaselineConfig {
  double tol = 1e-8;
  long max_iterations = 1000;
  // Richardson step; empty means 1 / (||A||_1 + ||B||_1).
  std::optional<double> richardson_omega;
  std::size_t kron_capacity = kDefaultKronCapacity;
  bool record_trajectory = false;
  // Called with each CG search direction, in order.
  std::function<void(const Matrix&)> on_cg_direction;

  void validate() const;
};

/// Conjugate gradient on L(X) = AX + XB under the trace inner product.
/// Requires A and B symmetric; throws SolveFailure("cg-breakdown") when a
/// direction has non-positive curvature.
SolveReport solve_cg(const SylvesterProblem& p, const BaselineConfig& cfg = {},
                     const std::optional<Matrix>& x0 = std::nullopt);

/// Damped Richardson X <- X - omega R with depth-1 Anderson mixing.
SolveReport solve_anderson_richardson(const SylvesterProblem& p, const BaselineConfig& cfg = {},
                                      const std::optional<Matrix>& x0 = std::nullopt);

/// A^T x + x A - x N x + K
Matrix care_residual_matrix(const CareProblem& p, const Matrix& x);
double care_residual(const CareProblem& p, const Matrix& x);

/// A^T x + x A + Q
Matrix lyapunov_residual_matrix(const LyapunovProblem& p, const Matrix& x);
double lyapunov_residual(const LyapunovProblem& p, const Matrix& x);

/// LU on (I (x) A^T + A^T (x) I) vec(X) = -vec(Q); result symmetrized.
Matrix solve_lyapunov_direct(const LyapunovProblem& p,
                             std::size_t max_elements = kDefaultKronCapacity);

/// Newton's method with exact Lyapunov solves. Throws
/// SolveFailure("newton-breakdown") when a Lyapunov step is singular.
SolveReport solve_newton_care(const CareProblem& p, const Matrix& x0,
                              const BaselineConfig& cfg = {});

}  // namespace matrixopt
