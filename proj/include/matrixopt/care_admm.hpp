#pragma once

#include <array>
#include <optional>

#include "matrixopt/linalg.hpp"
#include "matrixopt/problems.hpp"
#include "matrixopt/report.hpp"

namespace matrixopt {

/// Primal blocks X, Y, Z, W and multipliers for A^T X = Y, X = Z, Z N = W.
struct AdmmState {
  Matrix x, y, z, w, lambda, pi, gamma;

  static AdmmState zeros(std::size_t n);
};

struct AdmmConfig {
  double alpha = 0.5;
  double beta = 10.0;
  double gamma = 0.05;
  double tol = 1e-8;
  long max_iterations = 50000;
  long check_every = 1;
  bool track_lagrangian = false;

  void validate() const;
};

/// Holds the factorization of A A^T + beta I + gamma N N^T, which is fixed
/// for a run; admm_step builds one per call.
class CareAdmmStepper {
 public:
  CareAdmmStepper(const CareProblem& p, const AdmmConfig& cfg);
  AdmmState step(const AdmmState& s) const;

 private:
  const CareProblem& p_;
  AdmmConfig cfg_;
  Matrix at_, aat_, nt_;
  SystemFactor z_system_;
};

/// One sweep X -> Y -> Z -> W -> multipliers. Throws BreakdownError if a
/// linear solve fails.
AdmmState admm_step(const CareProblem& p, const AdmmState& s, const AdmmConfig& cfg);

/// Stationarity in X, Y, Z, W, then the gaps A^T X - Y, X - Z, Z N - W.
std::array<double, 7> kkt_residuals(const CareProblem& p, const AdmmState& s);

double lagrangian_value(const CareProblem& p, const AdmmState& s, const AdmmConfig& cfg);

/// L(prev) - L(next) minus the guaranteed decrease (penalty-weighted primal
/// changes less the multiplier changes). Non-negative up to roundoff.
double admm_decrease_slack(const CareProblem& p, const AdmmState& prev, const AdmmState& next,
                           const AdmmConfig& cfg);

/// KKT point built from a CARE solution: Y = A^T X, Z = X, W = X N, zero
/// multipliers.
AdmmState admm_kkt_state(const CareProblem& p, const Matrix& x);

/// Detail scalars: "asymmetry", "closed_loop_max_real_eig", "kkt_max", and
/// with track_lagrangian "decrease_violations". Series with
/// track_lagrangian: "lagrangian", "decrease_slack",
/// "multiplier_increment_partial_sum".
/// Throws SolveFailure("admm-breakdown").
SolveReport solve_care_admm(const CareProblem& p, const AdmmConfig& cfg = {},
                            const std::optional<AdmmState>& init = std::nullopt);

}  // namespace matrixopt
