#pragma once

#include <array>
#include <optional>

#include "matrixopt/linalg.hpp"
#include "matrixopt/problems.hpp"
#include "matrixopt/report.hpp"

namespace matrixopt {

/// Primal blocks X, Y, Z and multipliers for A^T X = Y, X = Z.
struct LyapAdmmState {
  Matrix x, y, z, lambda, pi;

  static LyapAdmmState zeros(std::size_t n);
};

struct LyapAdmmConfig {
  double alpha = 0.5;
  double beta = 10.0;
  double tol = 1e-8;
  long max_iterations = 5000;
  bool track_lagrangian = false;

  void validate() const;
};

/// Factors alpha A A^T + beta I and A A^T + beta I once per Lyapunov problem.
class LyapunovAdmmStepper {
 public:
  LyapunovAdmmStepper(const LyapunovProblem& p, const LyapAdmmConfig& cfg);
  LyapAdmmState step(const LyapAdmmState& s) const;

 private:
  const LyapunovProblem& p_;
  LyapAdmmConfig cfg_;
  Matrix at_;
  SystemFactor x_system_, z_system_;
};

LyapAdmmState lyap_admm_step(const LyapunovProblem& p, const LyapAdmmState& s,
                             const LyapAdmmConfig& cfg);

/// Stationarity in X, Y, Z, then the gaps A^T X - Y and X - Z.
std::array<double, 5> lyap_kkt_residuals(const LyapunovProblem& p, const LyapAdmmState& s);
double lyap_lagrangian_value(const LyapunovProblem& p, const LyapAdmmState& s,
                             const LyapAdmmConfig& cfg);
double lyap_decrease_slack(const LyapunovProblem& p, const LyapAdmmState& prev,
                           const LyapAdmmState& next, const LyapAdmmConfig& cfg);
LyapAdmmState lyap_kkt_state(const LyapunovProblem& p, const Matrix& x);

/// Stops on ||A^T X + X A + Q||_F <= tol. The report holds (X + X^T)/2; the
/// raw final state goes to final_state when given. Detail scalars:
/// "asymmetry", and with track_lagrangian "decrease_violations",
/// "min_decrease_slack". Throws SolveFailure("admm-breakdown").
SolveReport solve_lyapunov_admm(const LyapunovProblem& p, const LyapAdmmConfig& cfg = {},
                                const std::optional<LyapAdmmState>& init = std::nullopt,
                                LyapAdmmState* final_state = nullptr);

struct InnerTolRule {
  enum class Kind { fixed, forcing };
  Kind kind = Kind::forcing;
  double value = 0.1;

  static InnerTolRule fixed(double tol) { return {Kind::fixed, tol}; }
  static InnerTolRule forcing(double eta) { return {Kind::forcing, eta}; }
};

struct NewtonAdmmConfig {
  double alpha = 0.5;
  double beta = 10.0;
  double outer_tol = 1e-8;
  long outer_max = 50;
  InnerTolRule inner_tol_rule;
  long inner_max = 5000;
  bool warm_start = true;
  bool track_lagrangian = false;
  bool record_trajectory = false;

  void validate() const;
};

/// (A - N x)^T e + e (A - N x)
Matrix frechet_apply(const CareProblem& p, const Matrix& x, const Matrix& e);

/// Newton on the CARE with each Lyapunov step solved by 3-block ADMM.
/// report.iterations is the total inner iteration count; residual_history
/// has one CARE residual per outer iteration. Detail scalars:
/// "outer_iterations", and with track_lagrangian "inner_decrease_violations".
/// Series: "inner_iterations", "inner_tolerance", and with
/// track_lagrangian "inner_min_decrease_slack".
SolveReport solve_newton_admm(const CareProblem& p, const Matrix& x0,
                              const NewtonAdmmConfig& cfg = {});

}  // namespace matrixopt
