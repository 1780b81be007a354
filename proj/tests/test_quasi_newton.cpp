#include <cmath>

#include <gtest/gtest.h>

#include "matrixopt/errors.hpp"
#include "matrixopt/quasi_newton.hpp"
#include "matrixopt/sylvester.hpp"
#include "testutil.hpp"

using namespace matrixopt;

namespace {

SylvesterProblem scalar_problem() { return {Matrix{{3}}, Matrix{{6}}, Matrix{{9}}}; }

Matrix fd_gradient(const SylvesterProblem& p, const Matrix& x, double h) {
  Matrix g(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      Matrix xp = x, xm = x;
      xp(i, j) += h;
      xm(i, j) -= h;
      g(i, j) = (f1_value(p, xp) - f1_value(p, xm)) / (2 * h);
    }
  }
  return g;
}

}  // namespace

TEST(F1, ValueAndGradientExamples) {
  const auto p = scalar_problem();
  EXPECT_DOUBLE_EQ(f1_value(p, Matrix{{0}}), 40.5);
  EXPECT_DOUBLE_EQ(f1_value(p, Matrix{{1}}), 0.0);
  EXPECT_DOUBLE_EQ(f1_gradient(p, Matrix{{0}})(0, 0), -81.0);
  EXPECT_DOUBLE_EQ(f1_gradient(p, Matrix{{1}})(0, 0), 0.0);
  const auto q = random_sylvester(3, 2, 4);
  const Matrix x = Matrix::identity(3) * Matrix::zeros(3, 2);
  const double r = sylvester_residual(q, x);
  EXPECT_DOUBLE_EQ(f1_value(q, x), 0.5 * r * r);
  EXPECT_THROW(f1_gradient(q, Matrix::zeros(2, 3)), DimensionError);
}

TEST(F1, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 20; ++t) {
    const std::size_t m = 1 + t % 8, n = 1 + t % 6;
    const auto p = random_sylvester(m, n, 50 + t);
    const Matrix x = testutil::random_matrix(m, n, rng);
    const Matrix g = f1_gradient(p, x);
    EXPECT_LE(frobenius_norm(g - fd_gradient(p, x, 1e-6)), 1e-6 * frobenius_norm(g));
  }
}

TEST(ExactStep, Examples) {
  const auto p = scalar_problem();
  const double lam = exact_step(p, Matrix{{0}}, Matrix{{81}});
  EXPECT_NEAR(lam, 1.0 / 81.0, 1e-16);
  EXPECT_DOUBLE_EQ(exact_step(p, Matrix{{1}}, Matrix{{5}}), 0.0);
  const auto q = random_sylvester(3, 3, 2);
  const Matrix sol = solve_kronecker_direct(q);
  std::mt19937_64 rng(2);
  const Matrix x = testutil::random_matrix(3, 3, rng);
  EXPECT_NEAR(exact_step(q, x, sol - x), 1.0, 1e-10);
  EXPECT_THROW(exact_step(p, Matrix{{0}}, Matrix{{0}}), DegenerateDirectionError);
}

TEST(ExactStep, OrthogonalityAfterStep) {
  std::mt19937_64 rng(3);
  const auto p = random_sylvester(4, 3, 3);
  const Matrix x = testutil::random_matrix(4, 3, rng);
  const Matrix d = -1.0 * f1_gradient(p, x);
  const double lam = exact_step(p, x, d);
  ASSERT_GT(lam, 0.0);
  const Matrix r = sylvester_residual_matrix(p, x + lam * d);
  const Matrix s = sylvester_apply(p, d);
  EXPECT_LE(std::abs(trace_inner(r, s)), 1e-10 * frobenius_norm(r) * frobenius_norm(s));
}

TEST(Wolfe, HandCheckedQuadratic) {
  const LineFunction phi = [](double a) { return std::pair{0.5 * (1 - a) * (1 - a), -(1 - a)}; };
  EXPECT_DOUBLE_EQ(wolfe_search(phi, 0.25, 0.75), 1.0);
  const LineFunction up = [](double a) { return std::pair{a, 1.0}; };
  EXPECT_THROW(wolfe_search(up, 0.25, 0.75), PreconditionError);
  // Unbounded below along the line: the bracket never closes.
  const LineFunction lin = [](double a) { return std::pair{-a, -1.0}; };
  EXPECT_THROW(wolfe_search(lin, 0.25, 0.75), LinesearchError);
}

TEST(Wolfe, PostConditionsOnF1) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const auto p = random_sylvester(3 + t % 4, 2 + t % 3, 200 + t);
    const Matrix x = testutil::random_matrix(p.m(), p.n(), rng);
    const Matrix g = f1_gradient(p, x);
    const Matrix d = -1.0 * g + 0.3 * testutil::random_matrix(p.m(), p.n(), rng);
    const double gd = trace_inner(g, d);
    if (gd >= 0) continue;
    const double a = wolfe_search(p, x, d, 1e-4, 0.9);
    EXPECT_LE(f1_value(p, x + a * d), f1_value(p, x) + 1e-4 * a * gd);
    EXPECT_GE(trace_inner(f1_gradient(p, x + a * d), d), 0.9 * gd);
  }
}

TEST(Armijo, SufficientDecrease) {
  const auto p = random_sylvester(3, 3, 9);
  const Matrix x = Matrix::zeros(3, 3);
  const Matrix d = -1.0 * f1_gradient(p, x);
  const double a = armijo_search(p, x, d, 1e-4);
  EXPECT_GT(a, 0.0);
  EXPECT_LE(f1_value(p, x + a * d), f1_value(p, x) - 1e-4 * a * trace_inner(d, d));
}

TEST(Updates, ScalarReducesToSecantRatio) {
  QnState s{Matrix{{0}}, Matrix{{0}}, Matrix{{7}}, Matrix{{0.5}}, Matrix{{2}}};
  EXPECT_NEAR(dfp_update(s, {})(0, 0), 0.25, 1e-15);
  EXPECT_NEAR(bfgs_update(s, {})(0, 0), 0.25, 1e-15);
  QnConfig v;
  v.mode = QnMode::vectorized;
  EXPECT_NEAR(dfp_update(s, v)(0, 0), 0.25, 1e-15);
  EXPECT_NEAR(bfgs_update(s, v)(0, 0), 0.25, 1e-15);
}

TEST(Updates, MatrixFormSecantWithNonsingularDenominator) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 10; ++t) {
    // Symmetric delta^T y: take y = M delta with M symmetric positive definite.
    const Matrix delta = testutil::random_matrix(5, 3, rng);
    const Matrix h = testutil::random_matrix(5, 5, rng);
    const Matrix y = (h.transpose() * h + Matrix::identity(5)) * delta;
    const Matrix gk = testutil::random_matrix(5, 5, rng);
    QnState s{Matrix::zeros(5, 3), Matrix::zeros(5, 3),
              gk.transpose() * gk + Matrix::identity(5), delta, y};
    for (const Matrix& g : {dfp_update(s, {}), bfgs_update(s, {})}) {
      EXPECT_LE(frobenius_norm(g * y - delta), 1e-10 * (1 + frobenius_norm(delta)));
      EXPECT_LE(secant_error(g, s), 1e-10 * (1 + frobenius_norm(delta)));
      EXPECT_LE(asymmetry(g), 1e-12 * frobenius_norm(g));
    }
  }
}

TEST(Updates, VectorizedCurvatureError) {
  QnConfig v;
  v.mode = QnMode::vectorized;
  QnState s{Matrix::zeros(2, 1), Matrix::zeros(2, 1), Matrix::identity(2), Matrix{{1}, {0}},
            Matrix{{-1}, {0}}};
  EXPECT_THROW(dfp_update(s, v), CurvatureError);
  EXPECT_THROW(bfgs_update(s, v), CurvatureError);
}

TEST(SolveQn, ScalarAndStartAtSolution) {
  for (auto m : {QnMethod::dfp, QnMethod::bfgs}) {
    QnConfig c;
    c.method = m;
    const auto rep = solve_quasi_newton(scalar_problem(), c);
    EXPECT_EQ(rep.termination, Termination::converged);
    EXPECT_EQ(rep.iterations, 1);
    EXPECT_NEAR(rep.solution(0, 0), 1.0, 1e-15);
    const SylvesterProblem q(2.0 * Matrix::identity(3), Matrix::identity(3), 3.0 * Matrix::identity(3));
    const auto r0 = solve_quasi_newton(q, c, Matrix::identity(3));
    EXPECT_EQ(r0.iterations, 0);
    EXPECT_EQ(r0.termination, Termination::converged);
    EXPECT_EQ(r0.residual_history.size(), 1u);
  }
}

TEST(SolveQn, PentadiagonalFamilyExactStep) {
  ProblemSource s;
  s.generator = "t5";
  s.order = 128;
  const auto p = make_sylvester(s);
  for (auto m : {QnMethod::dfp, QnMethod::bfgs}) {
    QnConfig c;
    c.method = m;
    const auto rep = solve_quasi_newton(p, c);
    EXPECT_EQ(rep.termination, Termination::converged);
    EXPECT_LE(rep.iterations, 5);
    EXPECT_LE(rep.final_residual, 1e-12);
  }
}

TEST(SolveQn, DescentAndOracleAllModes) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto p = random_sylvester(4, 3, 300 + seed, seed % 2 == 0);
    const Matrix ref = solve_kronecker_direct(p);
    for (auto mode : {QnMode::matrix_form, QnMode::vectorized}) {
      for (auto ls : {LineSearch::exact, LineSearch::wolfe}) {
        for (auto m : {QnMethod::dfp, QnMethod::bfgs}) {
          QnConfig c;
          c.method = m;
          c.mode = mode;
          c.linesearch = ls;
          c.max_iterations = 300;
          SolveReport rep;
          try {
            rep = solve_quasi_newton(p, c);
          } catch (const SolveFailure& f) {
            rep = f.partial_report();
          }
          const auto& h = rep.residual_history;
          for (std::size_t k = 1; k < h.size(); ++k) EXPECT_LE(h[k], h[k - 1] * (1 + 1e-12) + 1e-14);
          if (rep.termination == Termination::converged) {
            EXPECT_LE(testutil::rel_diff(rep.solution, ref), 1e-6);
          }
          if (mode == QnMode::vectorized) {
            EXPECT_EQ(rep.termination, Termination::converged);
            EXPECT_EQ(rep.detail.scalars.at("secant_violations"), 0.0);
          }
          EXPECT_EQ(rep.detail.scalars.at("symmetry_violations"), 0.0);
        }
      }
    }
  }
}

TEST(SolveQn, VectorizedDfpMatchesReferenceTrajectory) {
  // Textbook DFP with exact line search written directly on vec(X).
  const auto p = random_sylvester(3, 2, 77, true);
  const Matrix k = sylvester_kronecker_matrix(p);
  const Matrix kt = k.transpose();
  const Matrix c = vec(p.c);
  Matrix x = Matrix::zeros(6, 1), g = kt * (k * x - c), h = Matrix::identity(6);
  std::vector<double> hist{frobenius_norm(k * x - c)};
  for (int it = 0; it < 8 && frobenius_norm(g) >= 1e-8; ++it) {
    const Matrix d = -1.0 * (h * g);
    const Matrix r = k * x - c, s = k * d;
    const double lam = std::max(0.0, -trace_inner(r, s) / trace_inner(s, s));
    const Matrix dx = lam * d;
    x += dx;
    const Matrix gn = kt * (k * x - c);
    const Matrix y = gn - g;
    const Matrix hy = h * y;
    h = h + (1.0 / trace_inner(dx, y)) * (dx * dx.transpose()) -
        (1.0 / trace_inner(y, hy)) * (hy * hy.transpose());
    h = symmetrize(h);
    g = gn;
    hist.push_back(frobenius_norm(k * x - c));
  }
  QnConfig cfg;
  cfg.method = QnMethod::dfp;
  cfg.mode = QnMode::vectorized;
  const auto rep = solve_quasi_newton(p, cfg);
  ASSERT_EQ(rep.residual_history.size(), hist.size());
  for (std::size_t i = 0; i < hist.size(); ++i) {
    EXPECT_NEAR(rep.residual_history[i], hist[i], 1e-9 * (1 + hist[0]));
  }
  EXPECT_LE(testutil::rel_diff(rep.solution, unvec(x, 3, 2)), 1e-8);
}

TEST(SolveQn, VectorizedWolfeKeepsCurvature) {
  ProblemSource s;
  s.generator = "t5";
  s.order = 6;
  QnConfig c;
  c.mode = QnMode::vectorized;
  c.linesearch = LineSearch::wolfe;
  for (auto m : {QnMethod::dfp, QnMethod::bfgs}) {
    c.method = m;
    const auto rep = solve_quasi_newton(make_sylvester(s), c);
    EXPECT_EQ(rep.termination, Termination::converged);
    EXPECT_EQ(rep.detail.scalars.at("skipped_updates"), 0.0);
  }
}

TEST(SolveQn, ConfigValidation) {
  QnConfig c;
  c.sigma1 = 0.6;
  EXPECT_THROW(c.validate(), PreconditionError);
  c = {};
  c.sigma2 = 1e-5;
  EXPECT_THROW(c.validate(), PreconditionError);
  c = {};
  c.mode = QnMode::vectorized;
  c.capacity = 10;
  EXPECT_THROW(solve_quasi_newton(random_sylvester(4, 4, 1), c), CapacityError);
  EXPECT_EQ(parse_linesearch("wolfe"), LineSearch::wolfe);
  EXPECT_THROW(parse_linesearch("golden"), NotFoundError);
}
