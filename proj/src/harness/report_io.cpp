#include <cmath>
#include <cstdio>
#include <ostream>

#include <json.hpp>

#include "internal.hpp"

namespace matrixopt::harness {

namespace {

using nlohmann::json;

json config_value(const std::string& v) {
  char* end = nullptr;
  const long long i = std::strtoll(v.c_str(), &end, 10);
  if (!v.empty() && end == v.c_str() + v.size()) return i;
  const double d = std::strtod(v.c_str(), &end);
  if (!v.empty() && end == v.c_str() + v.size() && std::isfinite(d)) return d;
  if (v == "true") return true;
  if (v == "false") return false;
  return v;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

}  // namespace

std::string report_json(const RunRequest& req, const RunOutcome& out, bool include_history) {
  const SolveReport& r = out.report;
  json j;
  j["method"] = req.method;
  j["problem"] = {{"equation", std::string(to_string(req.equation))},
                  {"source", req.source.describe()}};
  if (!r.solution.empty()) j["problem"]["n"] = r.solution.rows();
  json cfg = json::object();
  for (const auto& [k, v] : out.effective_config) cfg[k] = config_value(v);
  j["config"] = cfg;
  j["iterations"] = r.iterations;
  j["final_residual"] = r.residual_history.empty() ? json(nullptr) : finite_or_null(r.final_residual);
  if (include_history) {
    json h = json::array();
    for (double v : r.residual_history) h.push_back(finite_or_null(v));
    j["residual_history"] = h;
  }
  j["termination"] = std::string(to_string(r.termination));
  j["wall_time_seconds"] = r.wall_time_seconds;
  json d = json::object();
  for (const auto& [k, v] : r.detail.scalars) d[k] = finite_or_null(v);
  for (const auto& [k, v] : r.detail.series) {
    json a = json::array();
    for (double x : v) a.push_back(finite_or_null(x));
    d[k] = a;
  }
  if (!r.warnings.empty()) d["warnings"] = r.warnings;
  if (out.failure_kind) {
    d["failure"] = *out.failure_kind;
    d["message"] = out.failure_message;
  }
  j["detail"] = d;
  return j.dump(2);
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& rows) {
  out << kBenchCsvHeader << '\n';
  for (const auto& r : rows) {
    out << csv_field(r.algorithm) << ',' << r.n << ',' << r.iterations << ','
        << num(r.final_residual) << ',';
    char t[32];
    std::snprintf(t, sizeof t, "%.6f", r.wall_time_seconds);
    out << t << ',';
    if (r.reference_iterations) out << *r.reference_iterations;
    out << ',';
    if (r.reference_error) out << num(*r.reference_error);
    out << '\n';
  }
}

std::string bench_summary_json(const BenchOptions& opt, const std::vector<BenchRecord>& rows) {
  json j;
  j["suite"] = opt.suite;
  j["cap"] = opt.cap;
  j["seed"] = opt.seed;
  json a = json::array();
  std::size_t converged = 0;
  for (const auto& r : rows) {
    json e{{"algorithm", r.algorithm}, {"method", r.method},     {"n", r.n},
           {"iterations", r.iterations}, {"final_residual", finite_or_null(r.final_residual)},
           {"wall_time_seconds", r.wall_time_seconds}, {"termination", r.termination}};
    e["paper_iterations"] = r.reference_iterations ? json(*r.reference_iterations) : json(nullptr);
    e["paper_error"] = r.reference_error ? json(*r.reference_error) : json(nullptr);
    if (!r.error.empty()) e["error"] = r.error;
    if (r.termination == "converged") ++converged;
    a.push_back(e);
  }
  j["rows"] = a;
  j["converged"] = converged;
  j["total"] = rows.size();
  return j.dump(2);
}

void write_sweep_csv(std::ostream& out, const SweepOptions& opt,
                     const std::vector<SweepPoint>& points) {
  for (const auto& ax : opt.axes) out << ax.name << ',';
  out << "iterations,final_residual,termination,best\n";
  for (const auto& p : points) {
    for (const auto& ax : opt.axes) {
      char b[32];
      std::snprintf(b, sizeof b, "%.6g", p.values.at(ax.name));
      out << b << ',';
    }
    out << p.iterations << ',' << num(p.final_residual) << ',' << p.termination << ','
        << (p.best ? "*" : "") << '\n';
  }
}

}  // namespace matrixopt::harness
