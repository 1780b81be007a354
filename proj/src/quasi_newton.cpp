#include "matrixopt/quasi_newton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "matrixopt/errors.hpp"
#include "matrixopt/sylvester.hpp"

namespace matrixopt {
namespace {

constexpr int kMaxTrials = 60;

bool vectorized_shape(const QnState& s) { return s.inv_hessian.rows() != s.x.rows(); }

void check_update_inputs(const QnState& s, const QnConfig& cfg) {
  if (s.delta.rows() != s.y.rows() || s.delta.cols() != s.y.cols()) {
    throw DimensionError("qn update: delta and y shapes differ");
  }
  const std::size_t t = s.delta.rows() * s.delta.cols();
  const std::size_t want = cfg.mode == QnMode::vectorized ? t : s.delta.rows();
  if (!s.inv_hessian.is_square() || s.inv_hessian.rows() != want) {
    throw DimensionError("qn update: inverse Hessian has the wrong order for the mode");
  }
  const double dy = trace_inner(s.delta, s.y);
  if (!(dy > cfg.curvature_floor)) {
    throw CurvatureError("qn update: <delta, y> = " + std::to_string(dy) +
                         " is below the curvature floor");
  }
}

// Vectorized updates as rank-one corrections on the mn x mn matrix.
Matrix vectorized_update(const QnState& s, const QnConfig& cfg, bool bfgs) {
  const Matrix d = vec(s.delta);
  const Matrix yv = vec(s.y);
  const Matrix& g = s.inv_hessian;
  const Matrix h = g * yv;
  const double rho = 1.0 / trace_inner(d, yv);
  const double yhy = trace_inner(yv, h);
  const std::size_t t = d.rows();
  Matrix out = g;
  const auto dv = d.data();
  const auto hv = h.data();
  if (bfgs) {
    const double c = rho * rho * yhy + rho;
    for (std::size_t i = 0; i < t; ++i)
      for (std::size_t j = 0; j < t; ++j)
        out(i, j) += -rho * (dv[i] * hv[j] + hv[i] * dv[j]) + c * dv[i] * dv[j];
  } else {
    if (!(std::abs(yhy) > cfg.curvature_floor)) {
      throw CurvatureError("dfp update: y^T G y is below the curvature floor");
    }
    for (std::size_t i = 0; i < t; ++i)
      for (std::size_t j = 0; j < t; ++j)
        out(i, j) += rho * dv[i] * dv[j] - hv[i] * hv[j] / yhy;
  }
  return symmetrize(out);
}

double slope_at_zero(const LineFunction& phi, double& value) {
  const auto [f0, d0] = phi(0.0);
  value = f0;
  return d0;
}

LineFunction f1_line(const SylvesterProblem& p, const Matrix& x, const Matrix& dir) {
  Matrix r = sylvester_residual_matrix(p, x);
  Matrix s = sylvester_apply(p, dir);
  const double rr = trace_inner(r, r);
  const double rs = trace_inner(r, s);
  const double ss = trace_inner(s, s);
  return [rr, rs, ss](double a) {
    return std::pair{0.5 * (rr + 2.0 * a * rs + a * a * ss), rs + a * ss};
  };
}

}  // namespace

std::string_view to_string(QnMethod m) { return m == QnMethod::dfp ? "dfp" : "bfgs"; }

std::string_view to_string(LineSearch l) {
  switch (l) {
    case LineSearch::exact: return "exact";
    case LineSearch::armijo: return "armijo";
    case LineSearch::wolfe: return "wolfe";
  }
  return "?";
}

std::string_view to_string(QnMode m) {
  return m == QnMode::matrix_form ? "matrix_form" : "vectorized";
}

LineSearch parse_linesearch(std::string_view s) {
  if (s == "exact") return LineSearch::exact;
  if (s == "armijo") return LineSearch::armijo;
  if (s == "wolfe") return LineSearch::wolfe;
  throw NotFoundError("unknown line search '" + std::string(s) + "'");
}

QnMode parse_qn_mode(std::string_view s) {
  if (s == "matrix_form" || s == "matrix") return QnMode::matrix_form;
  if (s == "vectorized") return QnMode::vectorized;
  throw NotFoundError("unknown quasi-Newton mode '" + std::string(s) + "'");
}

void QnConfig::validate() const {
  if (!(sigma1 > 0.0 && sigma1 < 0.5)) throw PreconditionError("qn: sigma1 must lie in (0, 0.5)");
  if (!(sigma2 > sigma1 && sigma2 < 1.0)) {
    throw PreconditionError("qn: sigma2 must lie in (sigma1, 1)");
  }
  if (!(grad_tol > 0.0)) throw PreconditionError("qn: grad_tol must be positive");
  if (max_iterations < 0) throw PreconditionError("qn: max_iterations must be >= 0");
  if (!(curvature_floor >= 0.0)) throw PreconditionError("qn: curvature_floor must be >= 0");
}

double f1_value(const SylvesterProblem& p, const Matrix& x) {
  const double r = sylvester_residual(p, x);
  return 0.5 * r * r;
}

Matrix f1_gradient(const SylvesterProblem& p, const Matrix& x) {
  const Matrix r = sylvester_residual_matrix(p, x);
  Matrix g = p.a.transpose() * r;
  g += r * p.b.transpose();
  return g;
}

double exact_step(const SylvesterProblem& p, const Matrix& x, const Matrix& dir) {
  const Matrix r = sylvester_residual_matrix(p, x);
  const Matrix s = sylvester_apply(p, dir);
  const double ss = trace_inner(s, s);
  if (!(ss > 0.0)) {
    throw DegenerateDirectionError("exact_step: direction lies in the operator null space");
  }
  return std::max(0.0, -trace_inner(r, s) / ss);
}

double wolfe_search(const LineFunction& phi, double sigma1, double sigma2) {
  double f0 = 0.0;
  const double d0 = slope_at_zero(phi, f0);
  if (!(d0 < 0.0)) throw PreconditionError("wolfe_search: direction is not a descent direction");
  auto sufficient = [&](double a, double f) { return f <= f0 + sigma1 * a * d0; };
  auto curvature = [&](double d) { return d >= sigma2 * d0; };
  int trials = 0;

  auto zoom = [&](double lo, double f_lo, double d_lo, double hi, double f_hi) -> double {
    while (trials < kMaxTrials) {
      const double width = hi - lo;
      // Quadratic interpolation from (lo, f_lo, d_lo) and (hi, f_hi), kept
      // away from the ends; otherwise bisect.
      double a = lo + 0.5 * width;
      const double denom = 2.0 * (f_hi - f_lo - d_lo * width);
      if (denom != 0.0) {
        const double q = lo - d_lo * width * width / denom;
        const double lo_b = std::min(lo, hi) + 0.1 * std::abs(width);
        const double hi_b = std::max(lo, hi) - 0.1 * std::abs(width);
        if (std::isfinite(q) && q >= lo_b && q <= hi_b) a = q;
      }
      const auto [f, d] = phi(a);
      ++trials;
      if (!sufficient(a, f) || f >= f_lo) {
        hi = a;
        f_hi = f;
      } else {
        if (curvature(d)) return a;
        if (d * (hi - lo) >= 0.0) {
          hi = lo;
          f_hi = f_lo;
        }
        lo = a;
        f_lo = f;
        d_lo = d;
      }
    }
    throw LinesearchError("wolfe_search: no acceptable step after " +
                          std::to_string(kMaxTrials) + " trials");
  };

  double a_prev = 0.0, f_prev = f0, d_prev = d0;
  double a = 1.0;
  while (trials < kMaxTrials) {
    const auto [f, d] = phi(a);
    ++trials;
    if (!std::isfinite(f) || !sufficient(a, f) || (a_prev > 0.0 && f >= f_prev)) {
      return zoom(a_prev, f_prev, d_prev, a, f);
    }
    if (curvature(d)) return a;
    if (d >= 0.0) return zoom(a, f, d, a_prev, f_prev);
    a_prev = a;
    f_prev = f;
    d_prev = d;
    a *= 2.0;
  }
  throw LinesearchError("wolfe_search: bracket failure after " + std::to_string(kMaxTrials) +
                        " trials");
}

double wolfe_search(const SylvesterProblem& p, const Matrix& x, const Matrix& dir,
                    double sigma1, double sigma2) {
  return wolfe_search(f1_line(p, x, dir), sigma1, sigma2);
}

double armijo_search(const LineFunction& phi, double sigma1) {
  double f0 = 0.0;
  const double d0 = slope_at_zero(phi, f0);
  if (!(d0 < 0.0)) throw PreconditionError("armijo_search: direction is not a descent direction");
  double a = 1.0;
  for (int trial = 0; trial < kMaxTrials; ++trial, a *= 0.5) {
    if (phi(a).first <= f0 + sigma1 * a * d0) return a;
  }
  throw LinesearchError("armijo_search: no sufficient decrease after " +
                        std::to_string(kMaxTrials) + " halvings");
}

double armijo_search(const SylvesterProblem& p, const Matrix& x, const Matrix& dir,
                     double sigma1) {
  return armijo_search(f1_line(p, x, dir), sigma1);
}

Matrix dfp_update(const QnState& s, const QnConfig& cfg) {
  check_update_inputs(s, cfg);
  if (cfg.mode == QnMode::vectorized) return vectorized_update(s, cfg, false);
  const Matrix& g = s.inv_hessian;
  const Matrix gy = g * s.y;
  const Matrix k1 = pseudo_inverse(s.delta.transpose() * s.y, cfg.pinv_rank_tol);
  const Matrix k2 = pseudo_inverse(s.y.transpose() * gy, cfg.pinv_rank_tol);
  Matrix out = g;
  out += s.delta * k1 * s.delta.transpose();
  out -= gy * k2 * gy.transpose();
  return symmetrize(out);
}

Matrix bfgs_update(const QnState& s, const QnConfig& cfg) {
  check_update_inputs(s, cfg);
  if (cfg.mode == QnMode::vectorized) return vectorized_update(s, cfg, true);
  const Matrix k = pseudo_inverse(s.delta.transpose() * s.y, cfg.pinv_rank_tol);
  const Matrix dk = s.delta * k;
  Matrix e = Matrix::identity(s.delta.rows());
  e -= dk * s.y.transpose();
  Matrix out = e * s.inv_hessian * e.transpose();
  out += dk * s.delta.transpose();
  return symmetrize(out);
}

double secant_error(const Matrix& g_new, const QnState& s) {
  if (vectorized_shape(s)) return frobenius_norm(g_new * vec(s.y) - vec(s.delta));
  return frobenius_norm(g_new * s.y - s.delta);
}

SolveReport solve_quasi_newton(const SylvesterProblem& p, const QnConfig& cfg,
                               const std::optional<Matrix>& x0) {
  cfg.validate();
  Stopwatch clock;
  const std::size_t m = p.m(), n = p.n();
  const bool vectorized = cfg.mode == QnMode::vectorized;
  const std::size_t order = vectorized ? m * n : m;
  if (vectorized && order > cfg.capacity / order) {
    throw CapacityError("vectorized quasi-Newton: inverse Hessian of order " +
                        std::to_string(order) + " exceeds capacity");
  }
  if (x0 && (x0->rows() != m || x0->cols() != n)) {
    throw DimensionError("solve_quasi_newton: x0 must be m x n");
  }

  QnState st;
  st.x = x0 ? *x0 : Matrix(m, n);
  st.g = f1_gradient(p, st.x);
  st.inv_hessian = Matrix::identity(order);

  SolveReport rep;
  rep.residual_history.push_back(sylvester_residual(p, st.x));
  auto& steps = rep.detail.series["step_length"];
  auto& secant = rep.detail.series["secant_error"];
  auto& applicable = rep.detail.series["secant_applicable"];
  auto& asym = rep.detail.series["asymmetry"];
  double restarts = 0, skipped = 0, secant_bad = 0, sym_bad = 0;

  auto finish = [&](Termination t) {
    rep.termination = t;
    rep.solution = st.x;
    rep.final_residual = rep.residual_history.back();
    rep.detail.scalars["restarts"] = restarts;
    rep.detail.scalars["skipped_updates"] = skipped;
    rep.detail.scalars["secant_violations"] = secant_bad;
    rep.detail.scalars["symmetry_violations"] = sym_bad;
    rep.wall_time_seconds = clock.seconds();
  };

  auto direction = [&]() {
    if (vectorized) return unvec(-(st.inv_hessian * vec(st.g)), m, n);
    return -(st.inv_hessian * st.g);
  };

  while (true) {
    if (frobenius_norm(st.g) < cfg.grad_tol) {
      finish(Termination::converged);
      return rep;
    }
    if (rep.iterations >= cfg.max_iterations) {
      finish(Termination::max_iterations);
      return rep;
    }
    Matrix dir = direction();
    // A non-descent direction means G lost positive definiteness; restart.
    if (!dir.all_finite() || !(trace_inner(st.g, dir) < 0.0)) {
      st.inv_hessian = Matrix::identity(order);
      dir = -st.g;
      restarts += 1;
    }
    double lambda = 0.0;
    try {
      switch (cfg.linesearch) {
        case LineSearch::exact: lambda = exact_step(p, st.x, dir); break;
        case LineSearch::wolfe: lambda = wolfe_search(p, st.x, dir, cfg.sigma1, cfg.sigma2); break;
        case LineSearch::armijo: lambda = armijo_search(p, st.x, dir, cfg.sigma1); break;
      }
    } catch (const LinesearchError& e) {
      finish(Termination::error);
      throw SolveFailure("linesearch-failed", e.what(), rep);
    } catch (const DegenerateDirectionError& e) {
      finish(Termination::error);
      throw SolveFailure("degenerate-direction", e.what(), rep);
    }
    steps.push_back(lambda);
    if (!(lambda > 0.0)) {
      finish(Termination::stagnated);
      return rep;
    }

    Matrix x_new = st.x + lambda * dir;
    Matrix g_new = f1_gradient(p, x_new);
    st.delta = x_new - st.x;
    st.y = g_new - st.g;
    st.x = std::move(x_new);
    st.g = std::move(g_new);
    rep.iterations += 1;
    rep.residual_history.push_back(sylvester_residual(p, st.x));
    if (!std::isfinite(rep.residual_history.back())) {
      finish(Termination::error);
      return rep;
    }
    if (frobenius_norm(st.g) < cfg.grad_tol) continue;

    Matrix g_next;
    try {
      g_next = cfg.method == QnMethod::dfp ? dfp_update(st, cfg) : bfgs_update(st, cfg);
    } catch (const CurvatureError&) {
      skipped += 1;
      continue;
    }
    if (!g_next.all_finite()) {
      st.inv_hessian = Matrix::identity(order);
      restarts += 1;
      continue;
    }
    bool secant_ok = true;
    if (!vectorized) {
      // G y = delta needs a symmetric, invertible delta^T y in matrix form.
      const Matrix dty = st.delta.transpose() * st.y;
      const double scale = frobenius_norm(dty);
      const Matrix k = pseudo_inverse(dty, cfg.pinv_rank_tol);
      const double inv_err = frobenius_norm(dty * k - Matrix::identity(n));
      secant_ok = asymmetry(dty) <= 1e-10 * scale && inv_err <= 1e-8 * std::sqrt(double(n));
    }
    const double rel_secant = secant_error(g_next, st) / (1.0 + frobenius_norm(st.delta));
    const double gnorm = frobenius_norm(g_next);
    const double rel_asym = gnorm > 0.0 ? asymmetry(g_next) / gnorm : 0.0;
    secant.push_back(rel_secant);
    applicable.push_back(secant_ok ? 1.0 : 0.0);
    asym.push_back(rel_asym);
    if (secant_ok && rel_secant > 1e-8) secant_bad += 1;
    if (rel_asym > 1e-10) sym_bad += 1;
    st.inv_hessian = std::move(g_next);
  }
}

}  // namespace matrixopt
