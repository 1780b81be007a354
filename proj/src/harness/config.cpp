#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>

#include "internal.hpp"
#include "matrixopt/errors.hpp"

namespace matrixopt::harness {

namespace detail {

std::string normalize_key(std::string_view key) {
  std::string k(key);
  for (auto& ch : k) {
    ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (ch == '-') ch = '_';
  }
  return k;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double get_double(const Settings& s, const std::string& key, double fallback) {
  const auto it = s.find(key);
  if (it == s.end()) return fallback;
  const std::string& v = it->second;
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw PreconditionError("setting '" + key + "': expected a number, got '" + v + "'");
  }
  return out;
}

long get_long(const Settings& s, const std::string& key, long fallback) {
  const auto it = s.find(key);
  if (it == s.end()) return fallback;
  const std::string& v = it->second;
  long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw PreconditionError("setting '" + key + "': expected an integer, got '" + v + "'");
  }
  return out;
}

bool get_bool(const Settings& s, const std::string& key, bool fallback) {
  const auto it = s.find(key);
  if (it == s.end()) return fallback;
  const std::string v = normalize_key(it->second);
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw PreconditionError("setting '" + key + "': expected a boolean, got '" + it->second + "'");
}

std::string get_string(const Settings& s, const std::string& key, const std::string& fallback) {
  const auto it = s.find(key);
  return it == s.end() ? fallback : it->second;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

const std::vector<std::string>& setting_keys() {
  static const std::vector<std::string> keys{
      "tol",        "max_iterations", "alpha",     "beta",      "gamma",
      "linesearch", "mode",           "sigma1",    "sigma2",    "omega",
      "epsilon",    "group_rows",     "row_norm_floor", "check_every",
      "inner_tol",  "inner_eta",      "inner_max", "outer_max", "warm_start",
      "kron_capacity"};
  return keys;
}

IniDocument parse_ini(std::istream& in) {
  IniDocument doc;
  std::string section;
  std::string line;
  std::size_t lineno = 0;
  const auto& keys = setting_keys();
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ParseError("unterminated section header", lineno);
      section = detail::normalize_key(detail::trim(std::string_view(t).substr(1, t.size() - 2)));
      const auto& methods = method_names();
      if (section != "general" &&
          std::find(methods.begin(), methods.end(), section) == methods.end()) {
        throw ParseError("unknown section [" + section + "]", lineno);
      }
      doc[section];
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", lineno);
    const std::string key = detail::normalize_key(detail::trim(std::string_view(t).substr(0, eq)));
    const std::string value = detail::trim(std::string_view(t).substr(eq + 1));
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ParseError("unknown key '" + key + "'", lineno);
    }
    if (value.empty()) throw ParseError("empty value for '" + key + "'", lineno);
    auto& sec = doc[section];
    if (sec.count(key)) throw ParseError("duplicate key '" + key + "'", lineno);
    sec[key] = value;
  }
  return doc;
}

IniDocument load_ini(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open config file " + path.string());
  try {
    return parse_ini(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string(), e);
  }
}

Settings resolve_settings(const IniDocument& doc, std::string_view method, const Settings& flags) {
  Settings out;
  for (const char* sec : {"", "general"}) {
    if (const auto it = doc.find(sec); it != doc.end()) {
      for (const auto& [k, v] : it->second) out[k] = v;
    }
  }
  if (const auto it = doc.find(std::string(method)); it != doc.end()) {
    for (const auto& [k, v] : it->second) out[k] = v;
  }
  for (const auto& [k, v] : flags) out[detail::normalize_key(k)] = v;
  return out;
}

}  // namespace matrixopt::harness
