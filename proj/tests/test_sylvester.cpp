#include <gtest/gtest.h>

#include "matrixopt/errors.hpp"
#include "matrixopt/sylvester.hpp"
#include "testutil.hpp"

using namespace matrixopt;

TEST(SylvesterResidual, Examples) {
  std::mt19937_64 rng(1);
  const SylvesterProblem p(Matrix::identity(3), Matrix::identity(2), testutil::random_matrix(3, 2, rng));
  EXPECT_DOUBLE_EQ(sylvester_residual(p, Matrix::zeros(3, 2)), frobenius_norm(p.c));
  const SylvesterProblem q(Matrix::identity(2), Matrix::identity(2), 2.0 * Matrix::identity(2));
  EXPECT_DOUBLE_EQ(sylvester_residual(q, Matrix::identity(2)), 0.0);
  const SylvesterProblem t3(2.0 * Matrix::identity(10), Matrix::identity(10), Matrix::identity(10));
  EXPECT_NEAR(sylvester_residual(t3, Matrix::identity(10) / 3.0), 0.0, 1e-15);
  EXPECT_THROW(sylvester_residual(p, Matrix::zeros(2, 3)), DimensionError);
}

TEST(KroneckerDirect, Examples) {
  const SylvesterProblem q(Matrix::identity(2), Matrix::identity(2), 2.0 * Matrix::identity(2));
  EXPECT_LE(frobenius_norm(solve_kronecker_direct(q) - Matrix::identity(2)), 1e-15);
  const SylvesterProblem d(Matrix{{2, 0}, {0, 3}}, Matrix{{1}}, Matrix{{3}, {8}});
  const Matrix x = solve_kronecker_direct(d);
  EXPECT_NEAR(x(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(x(1, 0), 2.0, 1e-15);
  const SylvesterProblem s(Matrix{{1}}, Matrix{{-1}}, Matrix{{1}});
  EXPECT_THROW(solve_kronecker_direct(s), SingularMatrixError);
}

TEST(KroneckerDirect, MatchesOperatorAndResidualBound) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 10; ++t) {
    const auto p = random_sylvester(2 + t % 5, 1 + t % 7, 100 + t);
    const Matrix k = sylvester_kronecker_matrix(p);
    const Matrix x = testutil::random_matrix(p.m(), p.n(), rng);
    // Kronecker form agrees with the matrix operator on random X.
    EXPECT_LE(frobenius_norm(k * vec(x) - vec(sylvester_apply(p, x))), 1e-12 * (1 + frobenius_norm(x)));
    const Matrix sol = solve_kronecker_direct(p);
    EXPECT_LE(sylvester_residual(p, sol), 1e-10 * (1 + frobenius_norm(p.c)));
  }
}

TEST(KroneckerDirect, CapacityGuard) {
  const auto p = random_sylvester(8, 8, 1);
  EXPECT_THROW(solve_kronecker_direct(p, 63 * 63), CapacityError);
  EXPECT_NO_THROW(solve_kronecker_direct(p, 64 * 64));
}
