#pragma once

#include <string>
#include <string_view>

#include "matrixopt/harness.hpp"

namespace matrixopt::harness::detail {

std::string normalize_key(std::string_view key);
std::string trim(std::string_view s);

// Throw PreconditionError naming the key on malformed values.
double get_double(const Settings& s, const std::string& key, double fallback);
long get_long(const Settings& s, const std::string& key, long fallback);
bool get_bool(const Settings& s, const std::string& key, bool fallback);
std::string get_string(const Settings& s, const std::string& key, const std::string& fallback);

std::string format_double(double v);

}  // namespace matrixopt::harness::detail
