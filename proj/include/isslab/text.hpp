#pragma once

// Small text helpers shared by the CSV writers and the scenario parser.

#include <cstdio>
#include <span>
#include <string>
#include <string_view>

namespace isslab {

/// Shortest round-trippable decimal text for a double (17 significant digits).
inline std::string format_real(double v) {
  char buf[40];
  if (v == 0.0) v = 0.0;  // no "-0" in reports
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string join_reals(std::span<const double> xs, std::string_view sep = ",") {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += format_real(xs[i]);
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace isslab
