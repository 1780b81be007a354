#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "matrixopt/problems.hpp"
#include "matrixopt/report.hpp"

namespace matrixopt::harness {

/// Flat key/value solver settings, e.g. {"alpha", "0.8"}. Keys use
/// underscores; the CLI spells them with dashes.
using Settings = std::map<std::string, std::string>;

/// INI document: section name -> settings. Keys before the first section
/// land in section "".
using IniDocument = std::map<std::string, Settings>;

IniDocument parse_ini(std::istream& in);
IniDocument load_ini(const std::filesystem::path& path);

/// Every settings key any solver understands.
const std::vector<std::string>& setting_keys();

/// Layering: "" section, then [general], then [<method>], then flags.
Settings resolve_settings(const IniDocument& doc, std::string_view method,
                          const Settings& flags);

const std::vector<std::string>& method_names();
bool method_supports(EquationKind eq, std::string_view method);

struct RunRequest {
  EquationKind equation = EquationKind::sylvester;
  std::string method;
  ProblemSource source;
  Settings settings;
};

struct RunOutcome {
  SolveReport report;
  // Set when the solver threw; report then holds whatever partial state exists.
  std::optional<std::string> failure_kind;
  std::string failure_message;
  // Typed settings as the solver actually used them.
  std::map<std::string, std::string> effective_config;
};

/// Builds the problem and runs one solver. Invalid requests (unknown method,
/// bad settings, unreadable files) throw; solver failures are folded into
/// the outcome.
RunOutcome run(const RunRequest& req);

/// 0 converged, 2 max_iterations/stagnated, 3 solver failure or divergence.
int exit_code(const RunOutcome& out);

std::string report_json(const RunRequest& req, const RunOutcome& out,
                        bool include_history = true);

// bench --------------------------------------------------------------------

struct BenchOptions {
  std::string suite;
  std::size_t cap = 256;
  unsigned threads = 0;  // 0 = hardware concurrency
  std::uint64_t seed = 0;
  Settings overrides;
};

struct BenchRecord {
  std::string algorithm;
  std::string method;
  std::size_t n = 0;
  long iterations = 0;
  double final_residual = 0.0;
  double wall_time_seconds = 0.0;
  std::string termination;
  std::string error;
  std::optional<long> reference_iterations;
  std::optional<double> reference_error;
};

/// Effective worker count: requested (or hardware concurrency), capped by
/// MATRIXOPT_THREADS when set, and by the number of jobs.
unsigned worker_width(unsigned requested, std::size_t jobs);

std::vector<BenchRecord> run_bench(const BenchOptions& opt);
void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& rows);
std::string bench_summary_json(const BenchOptions& opt, const std::vector<BenchRecord>& rows);

inline constexpr std::string_view kBenchCsvHeader =
    "algorithm,n,iterations,final_residual,wall_time_seconds,paper_iterations,paper_error";

// sweep --------------------------------------------------------------------

struct SweepAxis {
  std::string name;  // alpha, beta or gamma
  double lo = 0.0;
  double hi = 0.0;
  std::size_t points = 1;
};

struct SweepOptions {
  RunRequest base;
  std::vector<SweepAxis> axes;
  bool random = false;  // log-uniform samples instead of a log-spaced grid
  std::size_t budget = 0;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

struct SweepPoint {
  std::map<std::string, double> values;
  long iterations = 0;
  double final_residual = 0.0;
  std::string termination;
  std::string error;
  bool best = false;
};

/// Grid points (or random samples) in evaluation order, at most budget.
std::vector<std::map<std::string, double>> sweep_points(const SweepOptions& opt);
std::vector<SweepPoint> run_sweep(const SweepOptions& opt);
void write_sweep_csv(std::ostream& out, const SweepOptions& opt,
                     const std::vector<SweepPoint>& points);

// plot ---------------------------------------------------------------------

struct PlotPoint {
  double x;
  double log10_residual;
};

/// (iteration, log10 r) pairs; zero residuals are clamped to 1e-300.
std::vector<PlotPoint> convergence_points(const std::vector<double>& history);
void write_convergence_svg(std::ostream& out, const std::vector<double>& history,
                           std::optional<double> tolerance, const std::string& title);
void write_convergence_svg(const std::filesystem::path& path, const std::vector<double>& history,
                           std::optional<double> tolerance, const std::string& title);

// cli ----------------------------------------------------------------------

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace matrixopt::harness
