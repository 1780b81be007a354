#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "matrixopt/errors.hpp"
#include "matrixopt/linalg.hpp"
#include "testutil.hpp"

using namespace matrixopt;
using testutil::random_matrix;

TEST(Matrix, ConstructionRejectsNonFinite) {
  EXPECT_THROW(Matrix(1, 2, {1.0, std::numeric_limits<double>::quiet_NaN()}), NonFiniteError);
  EXPECT_THROW(Matrix(1, 1, {std::numeric_limits<double>::infinity()}), NonFiniteError);
  EXPECT_THROW(Matrix(2, 2, {1.0, 2.0, 3.0}), DimensionError);
  EXPECT_THROW(Matrix(0, 3), DimensionError);
}

TEST(Matrix, RowMajorLayout) {
  const Matrix m{{1, 2, 3}, {4, 5, 6}};
  EXPECT_EQ(m.rows(), 2u);
  EXPECT_EQ(m.cols(), 3u);
  EXPECT_DOUBLE_EQ(m.data()[1], 2.0);
  EXPECT_DOUBLE_EQ(m.data()[3], 4.0);
  EXPECT_DOUBLE_EQ(m.transpose()(2, 1), 6.0);
  EXPECT_THROW(m.at(2, 0), DimensionError);
}

TEST(Matrix, ArithmeticShapeChecks) {
  const Matrix a = Matrix::identity(2);
  const Matrix b = Matrix::zeros(3, 2);
  EXPECT_THROW(a + b, DimensionError);
  EXPECT_THROW(a * b, DimensionError);
  EXPECT_EQ(b * a, b);
}

TEST(FrobeniusNorm, Examples) {
  EXPECT_DOUBLE_EQ(frobenius_norm(Matrix::zeros(3, 3)), 0.0);
  EXPECT_DOUBLE_EQ(frobenius_norm(Matrix::identity(4)), 2.0);
  EXPECT_DOUBLE_EQ(frobenius_norm(Matrix{{3, 4}}), 5.0);
}

TEST(TraceInner, Examples) {
  EXPECT_DOUBLE_EQ(trace_inner(Matrix::identity(2), Matrix::identity(2)), 2.0);
  EXPECT_DOUBLE_EQ(trace_inner(Matrix{{1, 2}, {3, 4}}, Matrix{{4, 3}, {2, 1}}), 20.0);
  EXPECT_DOUBLE_EQ(trace_inner(Matrix{{1, 2}, {3, 4}}, Matrix::zeros(2, 2)), 0.0);
  EXPECT_THROW(trace_inner(Matrix::identity(2), Matrix::identity(3)), DimensionError);
}

TEST(TraceInner, MatchesSquaredNormOnRandomMatrices) {
  std::mt19937_64 rng(1);
  for (std::size_t n : {1u, 7u, 33u, 64u}) {
    const Matrix a = random_matrix(n, 64 - n + 1, rng);
    const double f = frobenius_norm(a);
    EXPECT_NEAR(trace_inner(a, a), f * f, 1e-12 * f * f);
    const Matrix b = random_matrix(n, 64 - n + 1, rng);
    EXPECT_DOUBLE_EQ(trace_inner(a, b), trace_inner(b, a));
  }
}

TEST(LuSolve, Examples) {
  const Matrix b{{1}, {2}, {3}};
  EXPECT_EQ(lu_solve(Matrix::identity(3), b), b);
  const Matrix x = lu_solve(Matrix{{2, 0}, {0, 4}}, Matrix{{2}, {8}});
  EXPECT_DOUBLE_EQ(x(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(x(1, 0), 2.0);
  EXPECT_THROW(lu_solve(Matrix{{1, 1}, {1, 1}}, Matrix{{1}, {1}}), SingularMatrixError);
}

TEST(LuSolve, RequiresPivoting) {
  // Zero leading entry; fails without row exchange.
  const Matrix a{{0, 1}, {1, 0}};
  const Matrix x = lu_solve(a, Matrix{{3}, {5}});
  EXPECT_DOUBLE_EQ(x(0, 0), 5.0);
  EXPECT_DOUBLE_EQ(x(1, 0), 3.0);
}

TEST(LuSolve, BackwardErrorOnRandomSystems) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 10; ++t) {
    const std::size_t n = 5 + 5 * t;
    Matrix a = random_matrix(n, n, rng) / std::sqrt(static_cast<double>(n));
    a += 3.0 * Matrix::identity(n);
    const Matrix rhs = random_matrix(n, 3, rng);
    const Matrix x = lu_solve(a, rhs);
    EXPECT_LE(frobenius_norm(a * x - rhs), 1e-10 * (1 + frobenius_norm(rhs)));
  }
}

TEST(LuSolve, ShapeErrors) {
  EXPECT_THROW(lu_solve(Matrix::zeros(2, 3), Matrix::zeros(2, 1)), DimensionError);
  EXPECT_THROW(lu_solve(Matrix::identity(2), Matrix::zeros(3, 1)), DimensionError);
}

TEST(CholeskySolve, Examples) {
  Matrix x = cholesky_solve(4.0 * Matrix::identity(2), Matrix{{8}, {4}});
  EXPECT_DOUBLE_EQ(x(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(x(1, 0), 1.0);
  x = cholesky_solve(Matrix{{2, 1}, {1, 2}}, Matrix{{3}, {3}});
  EXPECT_NEAR(x(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(x(1, 0), 1.0, 1e-15);
  EXPECT_THROW(cholesky_solve(Matrix{{1, 2}, {2, 1}}, Matrix{{1}, {1}}), NotPositiveDefiniteError);
  EXPECT_THROW(cholesky_solve(Matrix{{1, 2}, {0, 1}}, Matrix{{1}, {1}}), PreconditionError);
}

TEST(PseudoInverse, Examples) {
  EXPECT_EQ(pseudo_inverse(Matrix::identity(3)), Matrix::identity(3));
  const Matrix p = pseudo_inverse(Matrix{{2, 0}, {0, 0}});
  EXPECT_DOUBLE_EQ(p(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(p(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(p(1, 0), 0.0);
  EXPECT_DOUBLE_EQ(p(1, 1), 0.0);
  const Matrix z = pseudo_inverse(Matrix::zeros(2, 3));
  EXPECT_EQ(z.rows(), 3u);
  EXPECT_EQ(z.cols(), 2u);
  EXPECT_DOUBLE_EQ(frobenius_norm(z), 0.0);
  EXPECT_THROW(pseudo_inverse(Matrix::identity(2), 0.0), PreconditionError);
}

TEST(PseudoInverse, PenroseIdentitiesOnRankDeficient) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 10; ++t) {
    const Matrix a = random_matrix(7, 3, rng) * random_matrix(3, 5, rng);  // rank 3
    const Matrix p = pseudo_inverse(a);
    const double na = frobenius_norm(a), np = frobenius_norm(p);
    EXPECT_LE(frobenius_norm(a * p * a - a), 1e-10 * na);
    EXPECT_LE(frobenius_norm(p * a * p - p), 1e-10 * np);
    EXPECT_LE(asymmetry(a * p), 1e-10 * frobenius_norm(a * p));
    EXPECT_LE(asymmetry(p * a), 1e-10 * frobenius_norm(p * a));
  }
}

TEST(Kron, Examples) {
  EXPECT_EQ(kron(Matrix::identity(2), Matrix::identity(2)), Matrix::identity(4));
  EXPECT_EQ(kron(Matrix{{1, 2}}, Matrix{{3}, {4}}), (Matrix{{3, 6}, {4, 8}}));
  EXPECT_THROW(kron(Matrix::identity(10), Matrix::identity(10), 99 * 99), CapacityError);
}

TEST(Kron, VecIdentity) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 5; ++t) {
    const Matrix a = random_matrix(3, 3, rng), x = random_matrix(3, 3, rng), b = random_matrix(3, 3, rng);
    const Matrix lhs = vec(a * x * b);
    const Matrix rhs = kron(b.transpose(), a) * vec(x);
    EXPECT_LE(frobenius_norm(lhs - rhs), 1e-12 * frobenius_norm(x) * frobenius_norm(a) * frobenius_norm(b));
  }
}

TEST(Vec, ColumnStacking) {
  const Matrix v = vec(Matrix{{1, 2}, {3, 4}});
  EXPECT_EQ(v, (Matrix{{1}, {3}, {2}, {4}}));
  EXPECT_EQ(vec(Matrix{{7.5}}), Matrix{{7.5}});
  std::mt19937_64 rng(5);
  const Matrix m = random_matrix(5, 7, rng);
  EXPECT_EQ(unvec(vec(m), 5, 7), m);
  EXPECT_THROW(unvec(vec(m), 6, 6), DimensionError);
  EXPECT_THROW(unvec(m, 5, 7), DimensionError);
}

TEST(SystemFactor, CholeskyAndLuPaths) {
  std::mt19937_64 rng(6);
  const Matrix g = random_matrix(6, 6, rng);
  const Matrix spd = g.transpose() * g + Matrix::identity(6);
  const Matrix gen = g + 4.0 * Matrix::identity(6);
  const Matrix rhs = random_matrix(6, 4, rng);
  const SystemFactor fs(spd), fg(gen);
  EXPECT_TRUE(fs.used_cholesky());
  EXPECT_FALSE(fg.used_cholesky());
  EXPECT_LE(frobenius_norm(spd * fs.solve(rhs) - rhs), 1e-10);
  EXPECT_LE(frobenius_norm(gen * fg.solve(rhs) - rhs), 1e-10);
  const Matrix rt = rhs.transpose();
  EXPECT_LE(frobenius_norm(fg.solve_right(rt) * gen - rt), 1e-10);
  EXPECT_LE(frobenius_norm(fs.solve_right(rt) * spd - rt), 1e-10);
  EXPECT_THROW(SystemFactor(Matrix{{1, 1}, {1, 1}}), SingularMatrixError);
}

TEST(Eigen, SymmetricAndGeneral) {
  const auto ev = symmetric_eigenvalues(Matrix{{1, 2}, {2, 1}});
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_NEAR(ev[0], -1.0, 1e-14);
  EXPECT_NEAR(ev[1], 3.0, 1e-14);
  // Rotation plus shift: eigenvalues -1 +- 2i.
  EXPECT_NEAR(max_real_eigenvalue(Matrix{{-1, 2}, {-2, -1}}), -1.0, 1e-14);
}
