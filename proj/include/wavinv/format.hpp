#pragma once

#include <charconv>
#include <string>
#include <string_view>

namespace wavinv {

/// Shortest decimal string that round-trips to the same double.
inline std::string format_double(double value) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, end);
}

/// Fixed significant-digit formatting for human-readable tables.
std::string format_sig(double value, int digits);

/// Strict full-string parse; returns false on trailing garbage.
bool parse_double(std::string_view text, double& out);

}  // namespace wavinv
