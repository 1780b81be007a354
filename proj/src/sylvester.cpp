#include "matrixopt/sylvester.hpp"

#include "matrixopt/errors.hpp"

namespace matrixopt {
namespace {

void check_iterate(const SylvesterProblem& p, const Matrix& x) {
  if (x.rows() != p.m() || x.cols() != p.n()) {
    throw DimensionError("iterate must be " + std::to_string(p.m()) + "x" +
                         std::to_string(p.n()) + ", got " + std::to_string(x.rows()) + "x" +
                         std::to_string(x.cols()));
  }
}

}  // namespace

Matrix sylvester_apply(const SylvesterProblem& p, const Matrix& x) {
  check_iterate(p, x);
  Matrix out = p.a * x;
  out += x * p.b;
  return out;
}

Matrix sylvester_residual_matrix(const SylvesterProblem& p, const Matrix& x) {
  Matrix r = sylvester_apply(p, x);
  r -= p.c;
  return r;
}

double sylvester_residual(const SylvesterProblem& p, const Matrix& x) {
  return frobenius_norm(sylvester_residual_matrix(p, x));
}

Matrix sylvester_kronecker_matrix(const SylvesterProblem& p, std::size_t max_elements) {
  const std::size_t mn = p.m() * p.n();
  if (mn > max_elements / mn) {
    throw CapacityError("Kronecker system of order " + std::to_string(mn) +
                        " exceeds capacity of " + std::to_string(max_elements) + " entries");
  }
  Matrix m = kron(Matrix::identity(p.n()), p.a, max_elements);
  m += kron(p.b.transpose(), Matrix::identity(p.m()), max_elements);
  return m;
}

Matrix solve_kronecker_direct(const SylvesterProblem& p, std::size_t max_elements) {
  const Matrix m = sylvester_kronecker_matrix(p, max_elements);
  try {
    return unvec(lu_solve(m, vec(p.c)), p.m(), p.n());
  } catch (const SingularMatrixError& e) {
    throw SingularMatrixError(std::string("Sylvester operator is singular (spectra of A and -B "
                                          "overlap): ") + e.what());
  }
}

}  // namespace matrixopt
