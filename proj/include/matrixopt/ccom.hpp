#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "matrixopt/linalg.hpp"
#include "matrixopt/problems.hpp"
#include "matrixopt/report.hpp"

namespace matrixopt {

struct CcomConfig {
  double epsilon = 1e-8;
  long max_iterations = 100;
  double row_norm_floor = 1e-12;
  // Consecutive entries of vec(X) sharing one weight; group_rows = m makes
  // each column of X a group.
  std::size_t group_rows = 1;
  std::size_t kron_capacity = kDefaultKronCapacity;

  void validate() const;
};

double l21_norm(const Matrix& m);

/// d_ii = 1 / (2 max(||row i of x||, floor)).
Matrix reweight_diagonal(const Matrix& x, double floor);

/// x = D^{-1} M^T (M D^{-1} M^T)^{-1} c for diagonal positive d.
Matrix ccom_step(const Matrix& m_sys, const Matrix& c_vec, const Matrix& d);

/// Same step with d given by the inverse weights 1/d_ii.
Matrix ccom_step_weights(const Matrix& m_sys, const Matrix& c_vec, std::span<const double> d_inv);

/// Iterates x_1..x_count of the reweighted scheme on M x = c, from D_0 = I.
std::vector<Matrix> ccom_iterates(const Matrix& m_sys, const Matrix& c_vec, long count,
                                  std::size_t group_rows = 1, double floor = 1e-12);

/// Sum of Euclidean norms over consecutive groups of a column vector.
double grouped_l21(const Matrix& x, std::size_t group_rows);

/// Detail series: "l21_objective" (one value per iterate), "feasibility".
/// Detail scalars: "l21_increase_violations".
SolveReport solve_ccom(const SylvesterProblem& p, const CcomConfig& cfg = {});

}  // namespace matrixopt
