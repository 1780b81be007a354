#include <cmath>

#include <gtest/gtest.h>

#include "matrixopt/baselines.hpp"
#include "matrixopt/errors.hpp"
#include "matrixopt/newton_admm.hpp"
#include "testutil.hpp"

using namespace matrixopt;

namespace {

const double kScalarRoot = (-2.0 + std::sqrt(29.0)) / 25.0;

CareProblem scalar_care() { return {Matrix{{-2}}, Matrix{{25}}, Matrix{{1}}}; }

}  // namespace

TEST(LyapStep, KktStateIsFixedPoint) {
  const LyapunovProblem p(Matrix{{-2}}, Matrix{{3}});
  const auto s = lyap_kkt_state(p, Matrix{{0.75}});
  EXPECT_DOUBLE_EQ(s.y(0, 0), -1.5);
  for (double v : lyap_kkt_residuals(p, s)) EXPECT_LE(v, 1e-12);
  LyapAdmmConfig c;
  c.alpha = 1;
  c.beta = 1;
  const auto t = lyap_admm_step(p, s, c);
  EXPECT_LE(std::abs(t.x(0, 0) - 0.75), 1e-9);
  EXPECT_LE(std::abs(t.y(0, 0) + 1.5), 1e-9);
  EXPECT_LE(std::abs(t.z(0, 0) - 0.75), 1e-9);
  EXPECT_LE(frobenius_norm(t.lambda) + frobenius_norm(t.pi), 1e-9);
}

TEST(LyapStep, FirstStepFromZero) {
  const auto p = random_stable_lyapunov(4, 2);
  LyapAdmmConfig c;
  c.alpha = 0.7;
  c.beta = 3;
  const auto s = lyap_admm_step(p, LyapAdmmState::zeros(4), c);
  EXPECT_EQ(frobenius_norm(s.x), 0.0);
  const Matrix y1 = (-1.0 / (1 + c.alpha)) * p.q;
  EXPECT_LE(frobenius_norm(s.y - y1), 1e-14);
  const Matrix m = p.a * p.a.transpose() + c.beta * Matrix::identity(4);
  const Matrix z1 = lu_solve(m.transpose(), ((-1.0 * y1 - p.q) * p.a.transpose()).transpose()).transpose();
  EXPECT_LE(frobenius_norm(s.z - z1), 1e-12);
}

TEST(SolveLyapAdmm, Oracles) {
  LyapAdmmConfig c;
  c.alpha = 1;
  c.beta = 1;
  const auto sc = solve_lyapunov_admm(LyapunovProblem(Matrix{{-2}}, Matrix{{3}}), c);
  EXPECT_EQ(sc.termination, Termination::converged);
  EXPECT_NEAR(sc.solution(0, 0), 0.75, 1e-8);

  const auto d = solve_lyapunov_admm(LyapunovProblem(Matrix{{-1, 0}, {0, -2}}, Matrix::identity(2)));
  EXPECT_LE(frobenius_norm(d.solution - Matrix{{0.5, 0}, {0, 0.25}}), 1e-6);

  const auto z = random_stable_lyapunov(3, 4);
  const auto zr = solve_lyapunov_admm(LyapunovProblem(z.a, Matrix::zeros(3, 3)));
  EXPECT_EQ(zr.iterations, 0);
  EXPECT_EQ(frobenius_norm(zr.solution), 0.0);

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto p = random_stable_lyapunov(2 + seed, 40 + seed);
    LyapAdmmConfig t;
    t.track_lagrangian = true;
    const auto r = solve_lyapunov_admm(p, t);
    ASSERT_EQ(r.termination, Termination::converged);
    EXPECT_LE(frobenius_norm(r.solution - solve_lyapunov_direct(p)), 1e-6);
    EXPECT_EQ(asymmetry(r.solution), 0.0);
    EXPECT_EQ(r.detail.scalars.at("decrease_violations"), 0.0);
  }
}

TEST(SolveLyapAdmm, MultiplierIdentities) {
  const auto p = random_stable_lyapunov(4, 9);
  LyapAdmmConfig c;
  LyapAdmmState s = LyapAdmmState::zeros(4);
  for (int k = 0; k < 10; ++k) {
    const auto t = lyap_admm_step(p, s, c);
    EXPECT_LE(frobenius_norm(t.lambda - s.lambda + c.alpha * (p.a.transpose() * t.x - t.y)), 1e-12);
    EXPECT_LE(frobenius_norm(t.pi - s.pi + c.beta * (t.x - t.z)), 1e-12);
    EXPECT_GE(lyap_decrease_slack(p, s, t, c), -1e-8);
    s = t;
  }
}

TEST(Frechet, LinearityAndDerivative) {
  std::mt19937_64 rng(3);
  const auto p = random_stable_care(3, 3);
  const Matrix x = symmetrize(testutil::random_matrix(3, 3, rng));
  const Matrix e = testutil::random_matrix(3, 3, rng), f = testutil::random_matrix(3, 3, rng);
  EXPECT_EQ(frobenius_norm(frechet_apply(p, x, Matrix::zeros(3, 3))), 0.0);
  EXPECT_LE(frobenius_norm(frechet_apply(p, x, e + f) - frechet_apply(p, x, e) - frechet_apply(p, x, f)), 1e-12 * 10);
  EXPECT_LE(frobenius_norm(frechet_apply(p, x, 2.5 * e) - 2.5 * frechet_apply(p, x, e)), 1e-12 * 10);
  const Matrix z = Matrix::zeros(3, 3);
  EXPECT_LE(frobenius_norm(frechet_apply(p, z, e) - (p.a.transpose() * e + e * p.a)), 1e-15);
  const double curv = frobenius_norm(e * p.n_mat * e);
  for (double h : {1e-4, 1e-5}) {
    const Matrix fd = (1.0 / h) * (care_residual_matrix(p, x + h * e) - care_residual_matrix(p, x));
    const double err = frobenius_norm(fd - frechet_apply(p, x, e));
    EXPECT_NEAR(err, h * curv, 1e-7);
  }
}

TEST(SolveNewtonAdmm, ScalarRoot) {
  const auto rep = solve_newton_admm(scalar_care(), Matrix{{0}});
  EXPECT_EQ(rep.termination, Termination::converged);
  EXPECT_NEAR(rep.solution(0, 0), kScalarRoot, 1e-8);
  EXPECT_EQ(rep.residual_history.size(),
            static_cast<std::size_t>(rep.detail.scalars.at("outer_iterations")) + 1);
  long total = 0;
  for (double v : rep.detail.series.at("inner_iterations")) total += static_cast<long>(v);
  EXPECT_EQ(total, rep.iterations);
}

TEST(SolveNewtonAdmm, NearExactInnerMatchesNewton) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto p = random_stable_care(4 + 2 * seed, seed);
    const Matrix x0 = Matrix::zeros(p.n(), p.n());
    NewtonAdmmConfig c;
    c.inner_tol_rule = InnerTolRule::fixed(1e-12);
    c.inner_max = 100000;
    c.record_trajectory = true;
    c.outer_tol = 1e-10;
    const auto na = solve_newton_admm(p, x0, c);
    BaselineConfig b;
    b.tol = 1e-10;
    b.record_trajectory = true;
    const auto nw = solve_newton_care(p, x0, b);
    ASSERT_EQ(na.termination, Termination::converged);
    const std::size_t k = std::min(na.trajectory.size(), nw.trajectory.size());
    ASSERT_GE(k, 2u);
    for (std::size_t i = 0; i < k; ++i) {
      EXPECT_LE(frobenius_norm(na.trajectory[i] - nw.trajectory[i]), 1e-6);
      EXPECT_LE(asymmetry(na.trajectory[i]), 1e-10);
    }
    // Newton-step identity: F'(X_k)(X_{k+1} - X_k) = -F(X_k) up to the inner tolerance.
    for (std::size_t i = 0; i + 1 < na.trajectory.size(); ++i) {
      const Matrix lhs = frechet_apply(p, na.trajectory[i], na.trajectory[i + 1] - na.trajectory[i]);
      EXPECT_LE(frobenius_norm(lhs + care_residual_matrix(p, na.trajectory[i])), 1e-9);
    }
  }
}

TEST(SolveNewtonAdmm, NinthFamily) {
  ProblemSource s;
  s.generator = "t9";
  s.order = 16;
  NewtonAdmmConfig c;
  c.alpha = 0.8;
  c.beta = 53.5;
  c.inner_tol_rule = InnerTolRule::fixed(1e-10);
  c.track_lagrangian = true;
  const auto rep = solve_newton_admm(make_care(s), Matrix::zeros(16, 16), c);
  EXPECT_EQ(rep.termination, Termination::converged);
  EXPECT_LE(rep.final_residual, 1e-9);
  EXPECT_GE(rep.iterations, 448 / 3);
  EXPECT_LE(rep.iterations, 3 * 448);
  EXPECT_EQ(rep.detail.scalars.at("inner_decrease_violations"), 0.0);
  EXPECT_FALSE(rep.warnings.empty());
}

TEST(SolveNewtonAdmm, StagnationAfterTwoCappedInnerRuns) {
  ProblemSource s;
  s.generator = "t9";
  s.order = 8;
  NewtonAdmmConfig c;
  c.inner_max = 3;
  c.inner_tol_rule = InnerTolRule::fixed(1e-12);
  const auto rep = solve_newton_admm(make_care(s), Matrix::zeros(8, 8), c);
  EXPECT_EQ(rep.termination, Termination::stagnated);
}

TEST(SolveNewtonAdmm, Validation) {
  NewtonAdmmConfig c;
  c.inner_tol_rule = InnerTolRule::forcing(1.5);
  EXPECT_THROW(c.validate(), PreconditionError);
  EXPECT_THROW(solve_newton_admm(random_stable_care(2, 1), Matrix{{1, 2}, {0, 1}}), PreconditionError);
}
