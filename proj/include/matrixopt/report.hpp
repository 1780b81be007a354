#pragma once

#include <chrono>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "matrixopt/errors.hpp"
#include "matrixopt/linalg.hpp"

namespace matrixopt {

enum class Termination { converged, max_iterations, stagnated, diverged, error };

std::string_view to_string(Termination t);

/// Solver-specific diagnostics: named scalars and named series.
struct Detail {
  std::map<std::string, double> scalars;
  std::map<std::string, std::vector<double>> series;
};

/// Outcome of one solver run. residual_history[0] is the residual of the
/// starting iterate and final_residual is its last entry. For single-level
/// solvers with check_every = 1 the history has iterations + 1 entries;
/// Newton-ADMM records one entry per outer iteration instead.
struct SolveReport {
  Matrix solution;
  long iterations = 0;
  std::vector<double> residual_history;
  double final_residual = 0.0;
  double wall_time_seconds = 0.0;
  Termination termination = Termination::error;
  Detail detail;
  std::vector<std::string> warnings;
  // Outer iterates, kept only when a config asks for them.
  std::vector<Matrix> trajectory;
};

/// A solver failed part-way; the report holds the state reached so far.
class SolveFailure : public Error {
 public:
  SolveFailure(std::string kind, const std::string& what, SolveReport partial)
      : Error(what), kind_(std::move(kind)), partial_(std::move(partial)) {}

  /// Short tag such as "linesearch-failed" or "newton-breakdown".
  const std::string& kind() const noexcept { return kind_; }
  const SolveReport& partial_report() const noexcept { return partial_; }

 private:
  std::string kind_;
  SolveReport partial_;
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace matrixopt
