#pragma once

#include <cstddef>

#include "matrixopt/linalg.hpp"
#include "matrixopt/problems.hpp"

namespace matrixopt {

/// A x + x B
Matrix sylvester_apply(const SylvesterProblem& p, const Matrix& x);
/// A x + x B - C
Matrix sylvester_residual_matrix(const SylvesterProblem& p, const Matrix& x);
double sylvester_residual(const SylvesterProblem& p, const Matrix& x);

/// M = I_n (x) A + B^T (x) I_m, so that M vec(X) = vec(AX + XB).
Matrix sylvester_kronecker_matrix(const SylvesterProblem& p,
                                  std::size_t max_elements = kDefaultKronCapacity);

/// LU on the Kronecker system.
Matrix solve_kronecker_direct(const SylvesterProblem& p,
                              std::size_t max_elements = kDefaultKronCapacity);

}  // namespace matrixopt
