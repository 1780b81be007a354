#include "matrixopt/newton_admm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "matrixopt/baselines.hpp"
#include "matrixopt/errors.hpp"

namespace matrixopt {
namespace {

double sq(const Matrix& m) { return trace_inner(m, m); }

void check_state(const LyapunovProblem& p, const LyapAdmmState& s) {
  for (const Matrix* m : {&s.x, &s.y, &s.z, &s.lambda, &s.pi}) {
    if (m->rows() != p.n() || m->cols() != p.n()) {
      throw DimensionError("Lyapunov ADMM state blocks must be " + std::to_string(p.n()) + "x" +
                           std::to_string(p.n()));
    }
  }
}

bool finite_state(const LyapAdmmState& s) {
  for (const Matrix* m : {&s.x, &s.y, &s.z, &s.lambda, &s.pi})
    if (!m->all_finite()) return false;
  return true;
}

const LyapAdmmConfig& validated(const LyapAdmmConfig& cfg) {
  cfg.validate();
  return cfg;
}

SystemFactor factor_or_breakdown(const Matrix& m, const char* which) {
  try {
    return SystemFactor(m);
  } catch (const Error& e) {
    throw BreakdownError(std::string("lyapunov admm: ") + which + " system failed: " + e.what());
  }
}

}  // namespace

LyapAdmmState LyapAdmmState::zeros(std::size_t n) {
  const Matrix z(n, n);
  return {z, z, z, z, z};
}

void LyapAdmmConfig::validate() const {
  if (!(alpha > 0.0 && beta > 0.0)) throw PreconditionError("lyapunov admm: alpha, beta must be positive");
  if (!(tol > 0.0)) throw PreconditionError("lyapunov admm: tol must be positive");
  if (max_iterations < 0) throw PreconditionError("lyapunov admm: max_iterations must be >= 0");
}

void NewtonAdmmConfig::validate() const {
  if (!(alpha > 0.0 && beta > 0.0)) throw PreconditionError("newton-admm: alpha, beta must be positive");
  if (!(outer_tol > 0.0)) throw PreconditionError("newton-admm: outer_tol must be positive");
  if (outer_max < 0 || inner_max < 0) throw PreconditionError("newton-admm: iteration caps must be >= 0");
  if (inner_tol_rule.kind == InnerTolRule::Kind::forcing) {
    if (!(inner_tol_rule.value > 0.0 && inner_tol_rule.value < 1.0)) {
      throw PreconditionError("newton-admm: forcing factor must lie in (0, 1)");
    }
  } else if (!(inner_tol_rule.value > 0.0)) {
    throw PreconditionError("newton-admm: fixed inner tolerance must be positive");
  }
}

LyapunovAdmmStepper::LyapunovAdmmStepper(const LyapunovProblem& p, const LyapAdmmConfig& cfg)
    : p_(p),
      cfg_(validated(cfg)),
      at_(p.a.transpose()),
      x_system_(factor_or_breakdown(
          symmetrize(cfg.alpha * (p.a * at_) + cfg.beta * Matrix::identity(p.n())), "X")),
      z_system_(factor_or_breakdown(
          symmetrize(p.a * at_ + cfg.beta * Matrix::identity(p.n())), "Z")) {}

LyapAdmmState LyapunovAdmmStepper::step(const LyapAdmmState& s) const {
  check_state(p_, s);
  const double al = cfg_.alpha, be = cfg_.beta;
  const Matrix& a = p_.a;
  LyapAdmmState out;

  Matrix rx = a * s.lambda;
  rx += s.pi;
  rx += al * (a * s.y);
  rx += be * s.z;
  out.x = x_system_.solve(rx);

  Matrix y = al * (at_ * out.x);
  y -= s.z * a;
  y -= p_.q;
  y -= s.lambda;
  out.y = y / (1.0 + al);

  Matrix rz = -(out.y + p_.q) * at_;
  rz -= s.pi;
  rz += be * out.x;
  out.z = z_system_.solve_right(rz);

  out.lambda = s.lambda - al * (at_ * out.x - out.y);
  out.pi = s.pi - be * (out.x - out.z);
  return out;
}

LyapAdmmState lyap_admm_step(const LyapunovProblem& p, const LyapAdmmState& s,
                             const LyapAdmmConfig& cfg) {
  return LyapunovAdmmStepper(p, cfg).step(s);
}

std::array<double, 5> lyap_kkt_residuals(const LyapunovProblem& p, const LyapAdmmState& s) {
  check_state(p, s);
  const Matrix e = s.y + s.z * p.a + p.q;
  return {
      frobenius_norm(p.a * s.lambda + s.pi),
      frobenius_norm(e + s.lambda),
      frobenius_norm(e * p.a.transpose() + s.pi),
      frobenius_norm(p.a.transpose() * s.x - s.y),
      frobenius_norm(s.x - s.z),
  };
}

double lyap_lagrangian_value(const LyapunovProblem& p, const LyapAdmmState& s,
                             const LyapAdmmConfig& cfg) {
  check_state(p, s);
  const Matrix e = s.y + s.z * p.a + p.q;
  const Matrix g1 = p.a.transpose() * s.x - s.y;
  const Matrix g2 = s.x - s.z;
  return 0.5 * sq(e) - trace_inner(s.lambda, g1) - trace_inner(s.pi, g2) +
         0.5 * cfg.alpha * sq(g1) + 0.5 * cfg.beta * sq(g2);
}

double lyap_decrease_slack(const LyapunovProblem& p, const LyapAdmmState& prev,
                           const LyapAdmmState& next, const LyapAdmmConfig& cfg) {
  const double bound = 0.5 * cfg.beta * sq(next.x - prev.x) +
                       0.5 * cfg.alpha * sq(next.y - prev.y) +
                       0.5 * cfg.beta * sq(next.z - prev.z) -
                       sq(next.lambda - prev.lambda) / cfg.alpha - sq(next.pi - prev.pi) / cfg.beta;
  return lyap_lagrangian_value(p, prev, cfg) - lyap_lagrangian_value(p, next, cfg) - bound;
}

LyapAdmmState lyap_kkt_state(const LyapunovProblem& p, const Matrix& x) {
  const Matrix z(p.n(), p.n());
  return {x, p.a.transpose() * x, x, z, z};
}

SolveReport solve_lyapunov_admm(const LyapunovProblem& p, const LyapAdmmConfig& cfg,
                                const std::optional<LyapAdmmState>& init,
                                LyapAdmmState* final_state) {
  cfg.validate();
  Stopwatch clock;
  LyapAdmmState s = init ? *init : LyapAdmmState::zeros(p.n());
  check_state(p, s);
  SolveReport rep;
  rep.residual_history.push_back(lyapunov_residual(p, s.x));
  rep.termination = Termination::max_iterations;
  double violations = 0.0;
  double min_slack = std::numeric_limits<double>::infinity();

  auto finish = [&]() {
    rep.solution = s.x.all_finite() ? symmetrize(s.x) : s.x;
    rep.final_residual = rep.residual_history.back();
    rep.detail.scalars["asymmetry"] = s.x.all_finite() ? asymmetry(s.x) : 0.0;
    if (cfg.track_lagrangian) {
      rep.detail.scalars["decrease_violations"] = violations;
      rep.detail.scalars["min_decrease_slack"] = min_slack;
    }
    rep.wall_time_seconds = clock.seconds();
    if (final_state) *final_state = s;
  };

  std::optional<LyapunovAdmmStepper> stepper;
  try {
    stepper.emplace(p, cfg);
  } catch (const BreakdownError& e) {
    rep.termination = Termination::error;
    finish();
    throw SolveFailure("admm-breakdown", e.what(), rep);
  }

  if (rep.residual_history.back() <= cfg.tol) rep.termination = Termination::converged;
  while (rep.termination == Termination::max_iterations && rep.iterations < cfg.max_iterations) {
    LyapAdmmState next = stepper->step(s);
    rep.iterations += 1;
    if (!finite_state(next)) {
      rep.termination = Termination::diverged;
      break;
    }
    if (cfg.track_lagrangian) {
      const double sl = lyap_decrease_slack(p, s, next, cfg);
      min_slack = std::min(min_slack, sl);
      if (sl < -1e-8) violations += 1.0;
    }
    s = std::move(next);
    const double r = lyapunov_residual(p, s.x);
    rep.residual_history.push_back(r);
    if (r <= cfg.tol) rep.termination = Termination::converged;
  }
  finish();
  return rep;
}

Matrix frechet_apply(const CareProblem& p, const Matrix& x, const Matrix& e) {
  for (const Matrix* m : {&x, &e}) {
    if (m->rows() != p.n() || m->cols() != p.n()) throw DimensionError("frechet_apply: shapes must be n x n");
  }
  const Matrix ak = p.a - p.n_mat * x;
  Matrix out = ak.transpose() * e;
  out += e * ak;
  return out;
}

SolveReport solve_newton_admm(const CareProblem& p, const Matrix& x0, const NewtonAdmmConfig& cfg) {
  cfg.validate();
  Stopwatch clock;
  if (x0.rows() != p.n() || x0.cols() != p.n()) throw DimensionError("newton-admm: x0 must be n x n");
  if (!is_symmetric(x0, 1e-12 * std::max(1.0, max_abs(x0)))) {
    throw PreconditionError("newton-admm: x0 must be symmetric");
  }
  SolveReport rep;
  {
    // Trace = eigenvalue sum; a positive trace rules out stability.
    const Matrix a0 = p.a - p.n_mat * x0;
    double trace = 0.0, right_edge = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.n(); ++i) {
      trace += a0(i, i);
      double radius = 0.0;
      for (std::size_t j = 0; j < p.n(); ++j)
        if (j != i) radius += std::abs(a0(i, j));
      right_edge = std::max(right_edge, a0(i, i) + radius);
    }
    if (trace > 0.0) {
      std::ostringstream os;
      os << "A - N X0 is not stable (eigenvalue sum " << trace << ", Gershgorin right edge "
         << right_edge << "); convergence to the stabilizing solution is not guaranteed";
      rep.warnings.push_back(os.str());
    }
  }

  Matrix x = x0;
  rep.residual_history.push_back(care_residual(p, x));
  if (cfg.record_trajectory) rep.trajectory.push_back(x);
  auto& inner_counts = rep.detail.series["inner_iterations"];
  auto& inner_tols = rep.detail.series["inner_tolerance"];
  std::vector<double>* inner_slack = cfg.track_lagrangian ? &rep.detail.series["inner_min_decrease_slack"] : nullptr;
  double inner_violations = 0.0;
  long outer = 0;
  int consecutive_capped = 0;
  LyapAdmmState inner = LyapAdmmState::zeros(p.n());

  auto finish = [&](Termination t) {
    rep.termination = t;
    rep.solution = x;
    rep.final_residual = rep.residual_history.back();
    rep.detail.scalars["outer_iterations"] = static_cast<double>(outer);
    if (cfg.track_lagrangian) rep.detail.scalars["inner_decrease_violations"] = inner_violations;
    rep.wall_time_seconds = clock.seconds();
  };

  while (true) {
    const double r = rep.residual_history.back();
    if (!std::isfinite(r)) {
      finish(Termination::error);
      return rep;
    }
    if (r <= cfg.outer_tol) {
      finish(Termination::converged);
      return rep;
    }
    if (outer >= cfg.outer_max) {
      finish(Termination::max_iterations);
      return rep;
    }
    const Matrix nx = p.n_mat * x;
    LyapunovProblem lp(p.a - nx, symmetrize(x * nx + p.k_mat));
    LyapAdmmConfig icfg;
    icfg.alpha = cfg.alpha;
    icfg.beta = cfg.beta;
    icfg.max_iterations = cfg.inner_max;
    icfg.track_lagrangian = cfg.track_lagrangian;
    icfg.tol = cfg.inner_tol_rule.kind == InnerTolRule::Kind::fixed
                   ? cfg.inner_tol_rule.value
                   : std::max(cfg.inner_tol_rule.value * r, cfg.outer_tol / 10.0);
    SolveReport in;
    try {
      in = solve_lyapunov_admm(lp, icfg,
                               cfg.warm_start ? std::optional<LyapAdmmState>(inner) : std::nullopt,
                               &inner);
    } catch (const SolveFailure& e) {
      finish(Termination::error);
      throw SolveFailure(e.kind(), e.what(), rep);
    }
    outer += 1;
    rep.iterations += in.iterations;
    inner_counts.push_back(static_cast<double>(in.iterations));
    inner_tols.push_back(icfg.tol);
    if (inner_slack) {
      inner_slack->push_back(in.detail.scalars["min_decrease_slack"]);
      inner_violations += in.detail.scalars["decrease_violations"];
    }
    if (in.termination == Termination::diverged) {
      finish(Termination::diverged);
      return rep;
    }
    x = in.solution;
    rep.residual_history.push_back(care_residual(p, x));
    if (cfg.record_trajectory) rep.trajectory.push_back(x);
    consecutive_capped = in.termination == Termination::max_iterations ? consecutive_capped + 1 : 0;
    if (consecutive_capped >= 2 && rep.residual_history.back() > cfg.outer_tol) {
      finish(Termination::stagnated);
      return rep;
    }
  }
}

}  // namespace matrixopt
