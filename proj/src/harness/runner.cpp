#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <random>
#include <thread>

#include "internal.hpp"
#include "matrixopt/baselines.hpp"
#include "matrixopt/care_admm.hpp"
#include "matrixopt/ccom.hpp"
#include "matrixopt/newton_admm.hpp"
#include "matrixopt/quasi_newton.hpp"
#include "matrixopt/sylvester.hpp"

namespace matrixopt::harness {

using detail::format_double;
using detail::get_bool;
using detail::get_double;
using detail::get_long;
using detail::get_string;

const std::vector<std::string>& method_names() {
  static const std::vector<std::string> names{"ccom", "dfp",    "bfgs",        "cg",    "ar",
                                              "admm", "newton", "newton-admm", "direct"};
  return names;
}

bool method_supports(EquationKind eq, std::string_view method) {
  switch (eq) {
    case EquationKind::sylvester:
      return method == "ccom" || method == "dfp" || method == "bfgs" || method == "cg" ||
             method == "ar" || method == "direct";
    case EquationKind::lyapunov:
      return method == "admm" || method == "direct";
    case EquationKind::care:
      return method == "admm" || method == "newton" || method == "newton-admm";
  }
  return false;
}

namespace {

using Config = std::map<std::string, std::string>;

std::size_t get_size(const Settings& s, const std::string& key, std::size_t fallback) {
  const long v = get_long(s, key, static_cast<long>(fallback));
  if (v <= 0) throw PreconditionError("setting '" + key + "' must be positive");
  return static_cast<std::size_t>(v);
}

SolveReport direct_report(const Matrix& x, double r0, double r, double seconds) {
  SolveReport rep;
  rep.solution = x;
  rep.iterations = 1;
  rep.residual_history = {r0, r};
  rep.final_residual = r;
  rep.wall_time_seconds = seconds;
  rep.termination = Termination::converged;
  return rep;
}

// The prepared solver: all settings parsed and validated up front, so that
// anything thrown while it runs is a solver failure rather than a usage error.
using Job = std::function<SolveReport()>;

Job prepare_sylvester(const std::string& method, const Settings& s, Config& eff,
                      const SylvesterProblem& p) {
  const std::size_t cap = get_size(s, "kron_capacity", kDefaultKronCapacity);
  eff["kron_capacity"] = std::to_string(cap);
  if (method == "ccom") {
    CcomConfig c;
    c.epsilon = get_double(s, "epsilon", get_double(s, "tol", c.epsilon));
    c.max_iterations = get_long(s, "max_iterations", c.max_iterations);
    c.row_norm_floor = get_double(s, "row_norm_floor", c.row_norm_floor);
    c.group_rows = get_size(s, "group_rows", c.group_rows);
    c.kron_capacity = cap;
    c.validate();
    eff["epsilon"] = format_double(c.epsilon);
    eff["max_iterations"] = std::to_string(c.max_iterations);
    eff["row_norm_floor"] = format_double(c.row_norm_floor);
    eff["group_rows"] = std::to_string(c.group_rows);
    return [p, c] { return solve_ccom(p, c); };
  }
  if (method == "dfp" || method == "bfgs") {
    QnConfig c;
    c.method = method == "dfp" ? QnMethod::dfp : QnMethod::bfgs;
    c.linesearch = parse_linesearch(get_string(s, "linesearch", std::string(to_string(c.linesearch))));
    c.mode = parse_qn_mode(get_string(s, "mode", std::string(to_string(c.mode))));
    c.sigma1 = get_double(s, "sigma1", c.sigma1);
    c.sigma2 = get_double(s, "sigma2", c.sigma2);
    c.grad_tol = get_double(s, "tol", c.grad_tol);
    c.max_iterations = get_long(s, "max_iterations", c.max_iterations);
    c.capacity = cap;
    c.validate();
    eff["linesearch"] = std::string(to_string(c.linesearch));
    eff["mode"] = std::string(to_string(c.mode));
    eff["sigma1"] = format_double(c.sigma1);
    eff["sigma2"] = format_double(c.sigma2);
    eff["tol"] = format_double(c.grad_tol);
    eff["max_iterations"] = std::to_string(c.max_iterations);
    return [p, c] { return solve_quasi_newton(p, c); };
  }
  if (method == "cg" || method == "ar") {
    BaselineConfig c;
    c.tol = get_double(s, "tol", c.tol);
    c.max_iterations = get_long(s, "max_iterations", c.max_iterations);
    c.kron_capacity = cap;
    if (s.count("omega")) c.richardson_omega = get_double(s, "omega", 0.0);
    c.validate();
    eff["tol"] = format_double(c.tol);
    eff["max_iterations"] = std::to_string(c.max_iterations);
    if (c.richardson_omega) eff["omega"] = format_double(*c.richardson_omega);
    if (method == "cg") return [p, c] { return solve_cg(p, c); };
    return [p, c] { return solve_anderson_richardson(p, c); };
  }
  return [p, cap] {
    Stopwatch sw;
    const Matrix x = solve_kronecker_direct(p, cap);
    return direct_report(x, frobenius_norm(p.c), sylvester_residual(p, x), sw.seconds());
  };
}

Job prepare_lyapunov(const std::string& method, const Settings& s, Config& eff,
                     const LyapunovProblem& p) {
  if (method == "admm") {
    LyapAdmmConfig c;
    c.alpha = get_double(s, "alpha", c.alpha);
    c.beta = get_double(s, "beta", c.beta);
    c.tol = get_double(s, "tol", c.tol);
    c.max_iterations = get_long(s, "max_iterations", c.max_iterations);
    c.validate();
    eff["alpha"] = format_double(c.alpha);
    eff["beta"] = format_double(c.beta);
    eff["tol"] = format_double(c.tol);
    eff["max_iterations"] = std::to_string(c.max_iterations);
    return [p, c] { return solve_lyapunov_admm(p, c); };
  }
  const std::size_t cap = get_size(s, "kron_capacity", kDefaultKronCapacity);
  eff["kron_capacity"] = std::to_string(cap);
  return [p, cap] {
    Stopwatch sw;
    const Matrix x = solve_lyapunov_direct(p, cap);
    return direct_report(x, frobenius_norm(p.q), lyapunov_residual(p, x), sw.seconds());
  };
}

Job prepare_care(const std::string& method, const Settings& s, Config& eff, const CareProblem& p) {
  if (method == "admm") {
    AdmmConfig c;
    c.alpha = get_double(s, "alpha", c.alpha);
    c.beta = get_double(s, "beta", c.beta);
    c.gamma = get_double(s, "gamma", c.gamma);
    c.tol = get_double(s, "tol", c.tol);
    c.max_iterations = get_long(s, "max_iterations", c.max_iterations);
    c.check_every = get_long(s, "check_every", c.check_every);
    c.validate();
    eff["alpha"] = format_double(c.alpha);
    eff["beta"] = format_double(c.beta);
    eff["gamma"] = format_double(c.gamma);
    eff["tol"] = format_double(c.tol);
    eff["max_iterations"] = std::to_string(c.max_iterations);
    eff["check_every"] = std::to_string(c.check_every);
    return [p, c] { return solve_care_admm(p, c); };
  }
  if (method == "newton") {
    BaselineConfig c;
    c.tol = get_double(s, "tol", c.tol);
    c.max_iterations = get_long(s, "max_iterations", 50);
    c.kron_capacity = get_size(s, "kron_capacity", c.kron_capacity);
    c.validate();
    eff["tol"] = format_double(c.tol);
    eff["max_iterations"] = std::to_string(c.max_iterations);
    eff["kron_capacity"] = std::to_string(c.kron_capacity);
    return [p, c] { return solve_newton_care(p, Matrix::zeros(p.n(), p.n()), c); };
  }
  NewtonAdmmConfig c;
  c.alpha = get_double(s, "alpha", c.alpha);
  c.beta = get_double(s, "beta", c.beta);
  c.outer_tol = get_double(s, "tol", c.outer_tol);
  c.outer_max = get_long(s, "outer_max", get_long(s, "max_iterations", c.outer_max));
  c.inner_max = get_long(s, "inner_max", c.inner_max);
  c.warm_start = get_bool(s, "warm_start", c.warm_start);
  if (s.count("inner_tol") && s.count("inner_eta")) {
    throw PreconditionError("settings 'inner_tol' and 'inner_eta' are mutually exclusive");
  }
  if (s.count("inner_tol")) c.inner_tol_rule = InnerTolRule::fixed(get_double(s, "inner_tol", 0));
  if (s.count("inner_eta")) c.inner_tol_rule = InnerTolRule::forcing(get_double(s, "inner_eta", 0));
  c.validate();
  eff["alpha"] = format_double(c.alpha);
  eff["beta"] = format_double(c.beta);
  eff["tol"] = format_double(c.outer_tol);
  eff["outer_max"] = std::to_string(c.outer_max);
  eff["inner_max"] = std::to_string(c.inner_max);
  eff["warm_start"] = c.warm_start ? "true" : "false";
  if (c.inner_tol_rule.kind == InnerTolRule::Kind::fixed) {
    eff["inner_tol"] = format_double(c.inner_tol_rule.value);
  } else {
    eff["inner_eta"] = format_double(c.inner_tol_rule.value);
  }
  return [p, c] { return solve_newton_admm(p, Matrix::zeros(p.n(), p.n()), c); };
}

void parallel_for(std::size_t count, unsigned width, const std::function<void(std::size_t)>& fn) {
  if (width <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < width; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

RunOutcome run(const RunRequest& req) {
  const auto& names = method_names();
  if (std::find(names.begin(), names.end(), req.method) == names.end()) {
    throw PreconditionError("unknown method '" + req.method + "'");
  }
  if (!method_supports(req.equation, req.method)) {
    throw PreconditionError("method '" + req.method + "' does not apply to " +
                            std::string(to_string(req.equation)) + " equations");
  }
  const auto& keys = setting_keys();
  for (const auto& [k, v] : req.settings) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
      throw PreconditionError("unknown setting '" + k + "'");
    }
  }
  RunOutcome out;
  Job job;
  switch (req.equation) {
    case EquationKind::sylvester:
      job = prepare_sylvester(req.method, req.settings, out.effective_config, make_sylvester(req.source));
      break;
    case EquationKind::lyapunov:
      job = prepare_lyapunov(req.method, req.settings, out.effective_config, make_lyapunov(req.source));
      break;
    case EquationKind::care:
      job = prepare_care(req.method, req.settings, out.effective_config, make_care(req.source));
      break;
  }
  Stopwatch sw;
  try {
    out.report = job();
  } catch (const SolveFailure& e) {
    out.report = e.partial_report();
    out.report.termination = Termination::error;
    out.failure_kind = e.kind();
    out.failure_message = e.what();
  } catch (const Error& e) {
    out.report.termination = Termination::error;
    out.report.wall_time_seconds = sw.seconds();
    out.failure_kind = "error";
    out.failure_message = e.what();
  }
  return out;
}

int exit_code(const RunOutcome& out) {
  if (out.failure_kind) return 3;
  switch (out.report.termination) {
    case Termination::converged: return 0;
    case Termination::max_iterations:
    case Termination::stagnated: return 2;
    case Termination::diverged:
    case Termination::error: return 3;
  }
  return 3;
}

unsigned worker_width(unsigned requested, std::size_t jobs) {
  unsigned w = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MATRIXOPT_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) w = std::min<unsigned>(w, static_cast<unsigned>(cap));
  }
  if (jobs > 0) w = std::min<unsigned>(w, static_cast<unsigned>(std::min<std::size_t>(jobs, 1u << 16)));
  return std::max(1u, w);
}

std::vector<BenchRecord> run_bench(const BenchOptions& opt) {
  const ReferenceSuite suite = reference_suite(opt.suite);
  std::vector<const SuiteRow*> rows;
  std::size_t smallest = std::numeric_limits<std::size_t>::max();
  for (const auto& r : suite.rows) {
    smallest = std::min(smallest, r.source.order);
    if (r.desk_scale && r.source.order <= opt.cap) rows.push_back(&r);
  }
  if (rows.empty()) {
    throw PreconditionError("cap " + std::to_string(opt.cap) + " is below the smallest order (" +
                            std::to_string(smallest) + ") of suite " + opt.suite);
  }
  std::vector<RunRequest> reqs;
  for (const auto* r : rows) {
    RunRequest req{suite.equation, r->method, r->source, r->settings};
    req.source.params["seed"] = static_cast<double>(opt.seed);
    for (const auto& [k, v] : opt.overrides) req.settings[detail::normalize_key(k)] = v;
    reqs.push_back(std::move(req));
  }
  std::vector<BenchRecord> out(rows.size());
  parallel_for(rows.size(), worker_width(opt.threads, rows.size()), [&](std::size_t i) {
    BenchRecord& rec = out[i];
    rec.algorithm = rows[i]->algorithm;
    rec.method = rows[i]->method;
    rec.n = rows[i]->source.order;
    rec.reference_iterations = rows[i]->reference_iterations;
    rec.reference_error = rows[i]->reference_error;
    try {
      const RunOutcome o = run(reqs[i]);
      rec.iterations = o.report.iterations;
      rec.final_residual = o.report.residual_history.empty()
                               ? std::numeric_limits<double>::quiet_NaN()
                               : o.report.final_residual;
      rec.wall_time_seconds = o.report.wall_time_seconds;
      rec.termination = std::string(to_string(o.report.termination));
      if (o.failure_kind) rec.error = *o.failure_kind + ": " + o.failure_message;
    } catch (const std::exception& e) {
      rec.final_residual = std::numeric_limits<double>::quiet_NaN();
      rec.termination = "error";
      rec.error = e.what();
    }
  });
  std::stable_sort(out.begin(), out.end(), [](const BenchRecord& a, const BenchRecord& b) {
    return std::tie(a.algorithm, a.n) < std::tie(b.algorithm, b.n);
  });
  return out;
}

std::vector<std::map<std::string, double>> sweep_points(const SweepOptions& opt) {
  if (opt.budget == 0) throw PreconditionError("sweep budget must be positive");
  if (opt.axes.empty()) throw PreconditionError("sweep needs at least one axis");
  for (const auto& ax : opt.axes) {
    if (ax.name != "alpha" && ax.name != "beta" && ax.name != "gamma") {
      throw PreconditionError("sweep axis must be alpha, beta or gamma, got '" + ax.name + "'");
    }
    if (!(ax.lo > 0.0) || !(ax.hi >= ax.lo) || !std::isfinite(ax.hi) || ax.points == 0) {
      throw PreconditionError("sweep axis '" + ax.name + "' needs 0 < lo <= hi and points >= 1");
    }
  }
  std::vector<std::map<std::string, double>> pts;
  if (opt.random) {
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t k = 0; k < opt.budget; ++k) {
      std::map<std::string, double> p;
      for (const auto& ax : opt.axes) {
        const double t = u(rng);
        p[ax.name] = std::exp(std::log(ax.lo) + t * (std::log(ax.hi) - std::log(ax.lo)));
      }
      pts.push_back(std::move(p));
    }
    return pts;
  }
  std::vector<std::size_t> idx(opt.axes.size(), 0);
  while (pts.size() < opt.budget) {
    std::map<std::string, double> p;
    for (std::size_t a = 0; a < opt.axes.size(); ++a) {
      const auto& ax = opt.axes[a];
      const double t = ax.points == 1 ? 0.0 : static_cast<double>(idx[a]) / (ax.points - 1);
      p[ax.name] = ax.points == 1 || ax.lo == ax.hi
                       ? ax.lo
                       : std::exp(std::log(ax.lo) + t * (std::log(ax.hi) - std::log(ax.lo)));
    }
    pts.push_back(std::move(p));
    std::size_t a = opt.axes.size();
    while (a > 0) {
      --a;
      if (++idx[a] < opt.axes[a].points) break;
      idx[a] = 0;
      if (a == 0) return pts;
    }
  }
  return pts;
}

std::vector<SweepPoint> run_sweep(const SweepOptions& opt) {
  const auto pts = sweep_points(opt);
  std::vector<RunRequest> reqs;
  for (const auto& p : pts) {
    RunRequest req = opt.base;
    for (const auto& [k, v] : p) req.settings[k] = format_double(v);
    reqs.push_back(std::move(req));
  }
  // Request errors (bad method, bad problem) surface before any run.
  if (!reqs.empty()) {
    const auto& names = method_names();
    if (std::find(names.begin(), names.end(), opt.base.method) == names.end() ||
        !method_supports(opt.base.equation, opt.base.method)) {
      throw PreconditionError("method '" + opt.base.method + "' cannot be swept for " +
                              std::string(to_string(opt.base.equation)));
    }
  }
  std::vector<SweepPoint> out(pts.size());
  parallel_for(pts.size(), worker_width(opt.threads, pts.size()), [&](std::size_t i) {
    SweepPoint& sp = out[i];
    sp.values = pts[i];
    try {
      const RunOutcome o = run(reqs[i]);
      sp.iterations = o.report.iterations;
      sp.final_residual = o.report.residual_history.empty()
                              ? std::numeric_limits<double>::quiet_NaN()
                              : o.report.final_residual;
      sp.termination = std::string(to_string(o.report.termination));
      if (o.failure_kind) sp.error = *o.failure_kind + ": " + o.failure_message;
    } catch (const std::exception& e) {
      sp.final_residual = std::numeric_limits<double>::quiet_NaN();
      sp.termination = "error";
      sp.error = e.what();
    }
  });
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].termination != "converged") continue;
    if (!best || out[i].iterations < out[*best].iterations ||
        (out[i].iterations == out[*best].iterations &&
         out[i].final_residual < out[*best].final_residual)) {
      best = i;
    }
  }
  if (best) out[*best].best = true;
  return out;
}

}  // namespace matrixopt::harness
