#pragma once

#include <functional>
#include <optional>
#include <string_view>
#include <utility>

#include "matrixopt/linalg.hpp"
#include "matrixopt/problems.hpp"
#include "matrixopt/report.hpp"

namespace matrixopt {

enum class QnMethod { dfp, bfgs };
enum class LineSearch { exact, armijo, wolfe };
enum class QnMode { matrix_form, vectorized };

std::string_view to_string(QnMethod m);
std::string_view to_string(LineSearch l);
std::string_view to_string(QnMode m);
LineSearch parse_linesearch(std::string_view s);
QnMode parse_qn_mode(std::string_view s);

struct QnConfig {
  QnMethod method = QnMethod::bfgs;
  LineSearch linesearch = LineSearch::exact;
  double sigma1 = 1e-4;
  double sigma2 = 0.9;
  double grad_tol = 1e-8;
  long max_iterations = 500;
  QnMode mode = QnMode::matrix_form;
  double curvature_floor = 1e-14;
  double pinv_rank_tol = kDefaultRankTol;
  // Bound on the entries of the mn x mn inverse Hessian in vectorized mode.
  std::size_t capacity = kDefaultKronCapacity;

  void validate() const;
};

/// G is m x m in matrix_form and mn x mn in vectorized mode; delta and y are
/// m x n in both.
struct QnState {
  Matrix x, g, inv_hessian, delta, y;
};

double f1_value(const SylvesterProblem& p, const Matrix& x);
/// A^T R + R B^T with R = A x + x B - C.
Matrix f1_gradient(const SylvesterProblem& p, const Matrix& x);

/// argmin over lambda >= 0 of f1(x + lambda dir).
double exact_step(const SylvesterProblem& p, const Matrix& x, const Matrix& dir);

/// phi(alpha) -> (value, slope) along a search direction.
using LineFunction = std::function<std::pair<double, double>(double)>;

/// Bracket-and-zoom search for a step meeting both Wolfe-Powell conditions.
double wolfe_search(const LineFunction& phi, double sigma1, double sigma2);
double wolfe_search(const SylvesterProblem& p, const Matrix& x, const Matrix& dir,
                    double sigma1, double sigma2);
/// Backtracking by halving from 1. Not globally convergent on f1.
double armijo_search(const LineFunction& phi, double sigma1);
double armijo_search(const SylvesterProblem& p, const Matrix& x, const Matrix& dir,
                     double sigma1);

Matrix dfp_update(const QnState& s, const QnConfig& cfg);
Matrix bfgs_update(const QnState& s, const QnConfig& cfg);

/// ||G y - delta||_F, with y and delta vectorized when G is mn x mn.
double secant_error(const Matrix& g_new, const QnState& s);

/// Detail series: "step_length", and per update "secant_error" (relative to
/// 1 + ||delta||), "secant_applicable" (1 when G y = delta is attainable),
/// "asymmetry" (relative to ||G||). Scalars: "restarts", "skipped_updates",
/// "secant_violations", "symmetry_violations".
/// Throws SolveFailure("linesearch-failed" | "degenerate-direction").
SolveReport solve_quasi_newton(const SylvesterProblem& p, const QnConfig& cfg = {},
                               const std::optional<Matrix>& x0 = std::nullopt);

}  // namespace matrixopt
