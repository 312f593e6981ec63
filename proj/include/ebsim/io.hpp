#pragma once

#include <charconv>
#include <string>

namespace ebsim {

/// Shortest round-trippable decimal form of a double, for CSV output.
inline std::string fmt_real(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace ebsim
