#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "internal.hpp"
#include "matrixopt/errors.hpp"

namespace matrixopt::harness {

namespace {

struct UsageError : Error {
  using Error::Error;
};

struct ProblemArgs {
  std::string generator;
  std::size_t n = 0;
  std::optional<std::size_t> m;
  std::uint64_t seed = 0;
  bool spd = false;
  std::vector<std::string> from_mm;

  void add_to(CLI::App* app) {
    app->add_option("--gen,--suite", generator, "Problem generator (t1..t10, ammonia, random)");
    app->add_option("--n", n, "Problem order");
    app->add_option("--m", m, "Row count for random Sylvester problems");
    app->add_option("--seed", seed, "Seed for random problems");
    app->add_flag("--spd", spd, "Random Sylvester problem with SPD coefficients");
    app->add_option("--from-mm", from_mm, "MatrixMarket files: A B C | A Q | A N K");
  }

  ProblemSource source() const {
    ProblemSource s;
    if (!from_mm.empty()) {
      for (const auto& f : from_mm) s.files.emplace_back(f);
      return s;
    }
    if (generator.empty()) throw UsageError("a problem source is required (--gen or --from-mm)");
    s.generator = generator;
    s.order = n;
    s.params["seed"] = static_cast<double>(seed);
    if (m) s.params["m"] = static_cast<double>(*m);
    if (spd) s.params["spd"] = 1.0;
    return s;
  }
};

// One --<key> option per setting plus repeatable --set key=value.
struct SettingArgs {
  std::map<std::string, std::string> storage;
  std::map<std::string, CLI::Option*> options;
  std::vector<std::string> sets;
  std::string config;

  void add_to(CLI::App* app) {
    for (const auto& key : setting_keys()) {
      std::string flag = "--" + key;
      std::replace(flag.begin(), flag.end(), '_', '-');
      if (key == "max_iterations") flag += ",--max-iter";
      options[key] = app->add_option(flag, storage[key]);
    }
    app->add_option("--set", sets, "Extra setting as key=value (repeatable)");
    app->add_option("--config", config, "INI file with [general] and per-method sections");
  }

  Settings flags() const {
    Settings out;
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + s + "'");
      out[detail::normalize_key(detail::trim(s.substr(0, eq)))] = detail::trim(s.substr(eq + 1));
    }
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) out[key] = storage.at(key);
    }
    return out;
  }

  Settings resolve(std::string_view method) const {
    IniDocument doc;
    if (!config.empty()) doc = load_ini(config);
    return resolve_settings(doc, method, flags());
  }
};

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open " + path + " for writing");
  return f;
}

SweepAxis parse_axis(const std::string& name, const std::string& spec) {
  SweepAxis ax;
  ax.name = name;
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  try {
    if (parts.size() == 1) {
      ax.lo = ax.hi = std::stod(parts[0]);
      ax.points = 1;
    } else if (parts.size() == 2 || parts.size() == 3) {
      ax.lo = std::stod(parts[0]);
      ax.hi = std::stod(parts[1]);
      ax.points = parts.size() == 3 ? std::stoul(parts[2]) : 5;
    } else {
      throw std::invalid_argument(spec);
    }
  } catch (const std::logic_error&) {
    throw UsageError("--" + name + "-range expects lo:hi[:points] or a single value, got '" +
                     spec + "'");
  }
  return ax;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Matrix equation solvers: Sylvester, Lyapunov and Riccati", "matrixopt"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "Run one solver and emit a JSON report");
  std::string solve_eq, solve_method, solve_out, solve_to_mm, solve_plot;
  bool no_history = false;
  ProblemArgs solve_prob;
  SettingArgs solve_set;
  solve->add_option("equation", solve_eq, "sylvester | lyapunov | care")->required();
  solve->add_option("--method", solve_method,
                    "ccom | dfp | bfgs | cg | ar | admm | newton | newton-admm | direct")
      ->required();
  solve_prob.add_to(solve);
  solve_set.add_to(solve);
  solve->add_option("--out", solve_out, "Write the JSON report here instead of stdout");
  solve->add_option("--to-mm", solve_to_mm, "Write the solution as a MatrixMarket file");
  solve->add_option("--plot", solve_plot, "Write an SVG convergence plot");
  solve->add_flag("--no-history", no_history, "Omit residual_history from the report");

  // bench
  auto* bench = app.add_subcommand("bench", "Run a table suite at desk scale and emit CSV");
  BenchOptions bopt;
  std::string bench_csv, bench_json;
  std::vector<std::string> bench_sets;
  bench->add_option("--suite", bopt.suite, "Suite id (t1..t10)")->required();
  bench->add_option("--cap", bopt.cap, "Largest order to run (default 256)");
  bench->add_option("--threads", bopt.threads, "Worker count (capped by MATRIXOPT_THREADS)");
  bench->add_option("--seed", bopt.seed, "Seed passed to every problem source");
  bench->add_option("--set", bench_sets, "Setting override key=value for every row");
  bench->add_option("--csv", bench_csv, "CSV output path (default stdout)");
  bench->add_option("--json", bench_json, "JSON summary output path");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Grid or log-random search over penalties");
  std::string sweep_eq, sweep_method, sweep_out;
  std::string alpha_range, beta_range, gamma_range;
  ProblemArgs sweep_prob;
  SettingArgs sweep_set;
  SweepOptions sopt;
  sopt.budget = 100;
  sweep->add_option("equation", sweep_eq, "lyapunov | care")->required();
  sweep->add_option("--method", sweep_method, "admm | newton-admm")->required();
  sweep_prob.add_to(sweep);
  sweep_set.add_to(sweep);
  sweep->add_option("--alpha-range", alpha_range, "lo:hi[:points]");
  sweep->add_option("--beta-range", beta_range, "lo:hi[:points]");
  sweep->add_option("--gamma-range", gamma_range, "lo:hi[:points]");
  sweep->add_flag("--random", sopt.random, "Log-uniform random samples instead of a grid");
  sweep->add_option("--budget", sopt.budget, "Maximum number of runs (default 100)");
  sweep->add_option("--sweep-seed", sopt.seed, "Seed for --random sampling");
  sweep->add_option("--threads", sopt.threads, "Worker count (capped by MATRIXOPT_THREADS)");
  sweep->add_option("--out", sweep_out, "CSV output path (default stdout)");

  // plot
  auto* plot = app.add_subcommand("plot", "Render a report's residual history as SVG");
  std::string plot_report, plot_out, plot_title;
  std::optional<double> plot_tol;
  plot->add_option("--report", plot_report, "JSON report from solve")->required();
  plot->add_option("--out", plot_out, "SVG output path")->required();
  plot->add_option("--tol", plot_tol, "Tolerance line (default: from the report config)");
  plot->add_option("--title", plot_title, "Chart title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (*solve) {
      RunRequest req;
      try {
        req.equation = parse_equation_kind(solve_eq);
        req.method = solve_method;
        req.source = solve_prob.source();
        req.settings = solve_set.resolve(solve_method);
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
      for (const auto& f : req.source.files) {
        std::ifstream probe(f);
        if (!probe) {
          err << "error: cannot open '" << f.string() << "'\n";
          return 3;
        }
      }
      RunOutcome res;
      try {
        res = run(req);
      } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 3;
      } catch (const Error& e) {
        err << "error: " << e.what() << "\n\n" << solve->help();
        return 1;
      }
      const std::string js = report_json(req, res, !no_history);
      if (solve_out.empty()) {
        out << js << '\n';
      } else {
        auto f = open_out(solve_out);
        f << js << '\n';
      }
      if (!solve_to_mm.empty() && !res.report.solution.empty()) {
        write_matrix_market(solve_to_mm, res.report.solution);
      }
      if (!solve_plot.empty() && !res.report.residual_history.empty()) {
        std::optional<double> tol;
        if (auto it = res.effective_config.find("tol"); it != res.effective_config.end()) {
          tol = std::stod(it->second);
        } else if (auto e = res.effective_config.find("epsilon"); e != res.effective_config.end()) {
          tol = std::stod(e->second);
        }
        write_convergence_svg(solve_plot, res.report.residual_history, tol,
                              solve_method + " on " + req.source.describe());
      }
      if (res.failure_kind) err << "solver failure (" << *res.failure_kind << "): " << res.failure_message << '\n';
      return exit_code(res);
    }

    if (*bench) {
      std::vector<BenchRecord> rows;
      try {
        for (const auto& s : bench_sets) {
          const auto eq = s.find('=');
          if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + s + "'");
          bopt.overrides[detail::normalize_key(detail::trim(s.substr(0, eq)))] =
              detail::trim(s.substr(eq + 1));
        }
        rows = run_bench(bopt);
      } catch (const UsageError&) {
        throw;
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
      if (bench_csv.empty()) {
        write_bench_csv(out, rows);
      } else {
        auto f = open_out(bench_csv);
        write_bench_csv(f, rows);
      }
      const std::string summary = bench_summary_json(bopt, rows);
      if (!bench_json.empty()) {
        auto f = open_out(bench_json);
        f << summary << '\n';
      }
      std::size_t converged = 0;
      for (const auto& r : rows) {
        if (r.termination == "converged") ++converged;
        if (!r.error.empty()) err << r.algorithm << " n=" << r.n << ": " << r.error << '\n';
      }
      err << "bench " << bopt.suite << ": " << converged << "/" << rows.size()
          << " rows converged\n";
      return 0;
    }

    if (*sweep) {
      std::vector<SweepPoint> pts;
      try {
        sopt.base.equation = parse_equation_kind(sweep_eq);
        sopt.base.method = sweep_method;
        sopt.base.source = sweep_prob.source();
        sopt.base.settings = sweep_set.resolve(sweep_method);
        if (!alpha_range.empty()) sopt.axes.push_back(parse_axis("alpha", alpha_range));
        if (!beta_range.empty()) sopt.axes.push_back(parse_axis("beta", beta_range));
        if (!gamma_range.empty()) sopt.axes.push_back(parse_axis("gamma", gamma_range));
        pts = run_sweep(sopt);
      } catch (const UsageError&) {
        throw;
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
      if (sweep_out.empty()) {
        write_sweep_csv(out, sopt, pts);
      } else {
        auto f = open_out(sweep_out);
        write_sweep_csv(f, sopt, pts);
      }
      for (const auto& p : pts) {
        if (!p.best) continue;
        err << "best:";
        for (const auto& [k, v] : p.values) err << ' ' << k << '=' << v;
        err << " iterations=" << p.iterations << '\n';
        return 0;
      }
      err << "no sweep point converged\n";
      return 2;
    }

    if (*plot) {
      std::ifstream in(plot_report);
      if (!in) throw UsageError("cannot open report " + plot_report);
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("report is not valid JSON: ") + e.what());
      }
      std::vector<double> hist;
      if (j.contains("residual_history")) {
        for (const auto& v : j["residual_history"]) {
          hist.push_back(v.is_number() ? v.get<double>()
                                       : std::numeric_limits<double>::quiet_NaN());
        }
      }
      if (hist.empty()) throw UsageError("plot: report has no residual history");
      std::optional<double> tol = plot_tol;
      if (!tol && j.contains("config")) {
        for (const char* k : {"tol", "epsilon"}) {
          if (j["config"].contains(k) && j["config"][k].is_number()) {
            tol = j["config"][k].get<double>();
            break;
          }
        }
      }
      std::string title = plot_title;
      if (title.empty() && j.contains("method")) title = j["method"].get<std::string>();
      try {
        write_convergence_svg(plot_out, hist, tol, title);
      } catch (const PreconditionError& e) {
        throw UsageError(e.what());
      }
      return 0;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}

}  // namespace matrixopt::harness
