#include "matrixopt/report.hpp"

namespace matrixopt {

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::max_iterations: return "max_iterations";
    case Termination::stagnated: return "stagnated";
    case Termination::diverged: return "diverged";
    case Termination::error: return "error";
  }
  return "error";
}

}  // namespace matrixopt
