#include "matrixopt/care_admm.hpp"

#include <algorithm>
#include <cmath>

#include "matrixopt/baselines.hpp"
#include "matrixopt/errors.hpp"

namespace matrixopt {
namespace {

double sq(const Matrix& m) { return trace_inner(m, m); }

bool finite_state(const AdmmState& s) {
  for (const Matrix* m : {&s.x, &s.y, &s.z, &s.w, &s.lambda, &s.pi, &s.gamma})
    if (!m->all_finite()) return false;
  return true;
}

void check_state(const CareProblem& p, const AdmmState& s) {
  for (const Matrix* m : {&s.x, &s.y, &s.z, &s.w, &s.lambda, &s.pi, &s.gamma}) {
    if (m->rows() != p.n() || m->cols() != p.n()) {
      throw DimensionError("ADMM state blocks must be " + std::to_string(p.n()) + "x" +
                           std::to_string(p.n()));
    }
  }
}

SystemFactor factor_or_breakdown(const Matrix& m, const char* which) {
  try {
    return SystemFactor(m);
  } catch (const Error& e) {
    throw BreakdownError(std::string("admm: ") + which + " system failed: " + e.what());
  }
}

const AdmmConfig& validated(const AdmmConfig& cfg) {
  cfg.validate();
  return cfg;
}

}  // namespace

AdmmState AdmmState::zeros(std::size_t n) {
  const Matrix z(n, n);
  return {z, z, z, z, z, z, z};
}

void AdmmConfig::validate() const {
  if (!(alpha > 0.0 && beta > 0.0 && gamma > 0.0)) {
    throw PreconditionError("admm: penalties alpha, beta, gamma must be positive");
  }
  if (!(tol > 0.0)) throw PreconditionError("admm: tol must be positive");
  if (max_iterations < 0) throw PreconditionError("admm: max_iterations must be >= 0");
  if (check_every < 1) throw PreconditionError("admm: check_every must be >= 1");
}

CareAdmmStepper::CareAdmmStepper(const CareProblem& p, const AdmmConfig& cfg)
    : p_(p),
      cfg_(validated(cfg)),
      at_(p.a.transpose()),
      aat_(p.a * at_),
      nt_(p.n_mat.transpose()),
      z_system_(factor_or_breakdown(
          symmetrize(aat_ + cfg.beta * Matrix::identity(p.n()) +
                     cfg.gamma * (p.n_mat * nt_)),
          "Z")) {}

AdmmState CareAdmmStepper::step(const AdmmState& s) const {
  check_state(p_, s);
  const double al = cfg_.alpha, be = cfg_.beta, ga = cfg_.gamma;
  const Matrix& a = p_.a;
  const Matrix& k = p_.k_mat;
  const Matrix eye = Matrix::identity(p_.n());
  const Matrix wt = s.w.transpose();
  AdmmState out;

  // X
  const Matrix sx = symmetrize(wt * s.w + al * aat_ + be * eye);
  Matrix rhs = wt * (s.y + s.z * a + k);
  rhs += a * s.lambda;
  rhs += s.pi;
  rhs += al * (a * s.y);
  rhs += be * s.z;
  out.x = factor_or_breakdown(sx, "X").solve(rhs);

  // Y
  const Matrix za = s.z * a;
  Matrix y = s.w * out.x;
  y += al * (at_ * out.x);
  y -= za;
  y -= k;
  y -= s.lambda;
  out.y = y / (1.0 + al);

  // Z (right inverse)
  Matrix rz = (s.w * out.x - out.y - k) * at_;
  rz -= s.pi;
  rz += s.gamma * nt_;
  rz += be * out.x;
  rz += ga * (s.w * nt_);
  out.z = z_system_.solve_right(rz);

  // W (right inverse)
  const Matrix xt = out.x.transpose();
  Matrix rw = (out.y + out.z * a + k) * xt;
  rw -= s.gamma;
  rw += ga * (out.z * p_.n_mat);
  out.w = factor_or_breakdown(symmetrize(out.x * xt + ga * eye), "W").solve_right(rw);

  out.lambda = s.lambda - al * (at_ * out.x - out.y);
  out.pi = s.pi - be * (out.x - out.z);
  out.gamma = s.gamma - ga * (out.z * p_.n_mat - out.w);
  return out;
}

AdmmState admm_step(const CareProblem& p, const AdmmState& s, const AdmmConfig& cfg) {
  return CareAdmmStepper(p, cfg).step(s);
}

std::array<double, 7> kkt_residuals(const CareProblem& p, const AdmmState& s) {
  check_state(p, s);
  const Matrix e = s.y + s.z * p.a - s.w * s.x + p.k_mat;
  const Matrix at = p.a.transpose();
  return {
      frobenius_norm(s.w.transpose() * e + p.a * s.lambda + s.pi),
      frobenius_norm(e + s.lambda),
      frobenius_norm(e * at + s.pi - s.gamma * p.n_mat.transpose()),
      frobenius_norm(s.gamma - e * s.x.transpose()),
      frobenius_norm(at * s.x - s.y),
      frobenius_norm(s.x - s.z),
      frobenius_norm(s.z * p.n_mat - s.w),
  };
}

double lagrangian_value(const CareProblem& p, const AdmmState& s, const AdmmConfig& cfg) {
  check_state(p, s);
  const Matrix e = s.y + s.z * p.a - s.w * s.x + p.k_mat;
  const Matrix g1 = p.a.transpose() * s.x - s.y;
  const Matrix g2 = s.x - s.z;
  const Matrix g3 = s.z * p.n_mat - s.w;
  return 0.5 * sq(e) - trace_inner(s.lambda, g1) - trace_inner(s.pi, g2) -
         trace_inner(s.gamma, g3) + 0.5 * cfg.alpha * sq(g1) + 0.5 * cfg.beta * sq(g2) +
         0.5 * cfg.gamma * sq(g3);
}

double admm_decrease_slack(const CareProblem& p, const AdmmState& prev, const AdmmState& next,
                           const AdmmConfig& cfg) {
  const double bound = 0.5 * cfg.beta * sq(next.x - prev.x) +
                       0.5 * cfg.alpha * sq(next.y - prev.y) +
                       0.5 * cfg.beta * sq(next.z - prev.z) +
                       0.5 * cfg.gamma * sq(next.w - prev.w) -
                       sq(next.lambda - prev.lambda) / cfg.alpha -
                       sq(next.pi - prev.pi) / cfg.beta - sq(next.gamma - prev.gamma) / cfg.gamma;
  return lagrangian_value(p, prev, cfg) - lagrangian_value(p, next, cfg) - bound;
}

AdmmState admm_kkt_state(const CareProblem& p, const Matrix& x) {
  const Matrix z(p.n(), p.n());
  return {x, p.a.transpose() * x, x, x * p.n_mat, z, z, z};
}

SolveReport solve_care_admm(const CareProblem& p, const AdmmConfig& cfg,
                            const std::optional<AdmmState>& init) {
  cfg.validate();
  Stopwatch clock;
  AdmmState s = init ? *init : AdmmState::zeros(p.n());
  check_state(p, s);
  SolveReport rep;
  rep.residual_history.push_back(care_residual(p, s.x));
  rep.termination = Termination::max_iterations;

  auto finish = [&]() {
    rep.solution = s.x;
    rep.final_residual = rep.residual_history.back();
    if (s.x.all_finite()) {
      rep.detail.scalars["asymmetry"] = asymmetry(s.x);
      const auto kkt = kkt_residuals(p, s);
      rep.detail.scalars["kkt_max"] = *std::max_element(kkt.begin(), kkt.end());
      try {
        rep.detail.scalars["closed_loop_max_real_eig"] =
            max_real_eigenvalue(p.a - p.n_mat * s.x);
      } catch (const Error&) {
      }
    }
    rep.wall_time_seconds = clock.seconds();
  };

  std::optional<CareAdmmStepper> stepper;
  try {
    stepper.emplace(p, cfg);
  } catch (const BreakdownError& e) {
    rep.termination = Termination::error;
    finish();
    throw SolveFailure("admm-breakdown", e.what(), rep);
  }

  std::vector<double>* lag = nullptr;
  std::vector<double>* slack = nullptr;
  std::vector<double>* partial = nullptr;
  double violations = 0.0, increments = 0.0;
  if (cfg.track_lagrangian) {
    lag = &rep.detail.series["lagrangian"];
    slack = &rep.detail.series["decrease_slack"];
    partial = &rep.detail.series["multiplier_increment_partial_sum"];
    lag->push_back(lagrangian_value(p, s, cfg));
  }

  if (rep.residual_history.back() <= cfg.tol) rep.termination = Termination::converged;
  while (rep.termination == Termination::max_iterations && rep.iterations < cfg.max_iterations) {
    AdmmState next;
    try {
      next = stepper->step(s);
    } catch (const BreakdownError& e) {
      rep.termination = Termination::error;
      finish();
      throw SolveFailure("admm-breakdown", e.what(), rep);
    }
    rep.iterations += 1;
    if (!finite_state(next)) {
      rep.termination = Termination::diverged;
      break;
    }
    if (cfg.track_lagrangian) {
      lag->push_back(lagrangian_value(p, next, cfg));
      const double sl = admm_decrease_slack(p, s, next, cfg);
      slack->push_back(sl);
      if (sl < -1e-8) violations += 1.0;
      increments += sq(next.lambda - s.lambda) / cfg.alpha + sq(next.pi - s.pi) / cfg.beta +
                    sq(next.gamma - s.gamma) / cfg.gamma;
      partial->push_back(increments);
    }
    s = std::move(next);
    if (rep.iterations % cfg.check_every == 0 || rep.iterations == cfg.max_iterations) {
      const double r = care_residual(p, s.x);
      rep.residual_history.push_back(r);
      if (r <= cfg.tol) rep.termination = Termination::converged;
    }
  }
  if (cfg.track_lagrangian) rep.detail.scalars["decrease_violations"] = violations;
  finish();
  return rep;
}

}  // namespace matrixopt
