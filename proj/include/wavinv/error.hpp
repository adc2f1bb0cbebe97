#pragma once

#include <stdexcept>
#include <string>

namespace wavinv {

/// Violated precondition on user-supplied input (bad extents, mismatched
/// dimensions, invalid config values).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical stage failed: singular factorization, eigen-residual check,
/// insufficient time horizon, span-membership gate.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidInput(message);
}

}  // namespace wavinv
