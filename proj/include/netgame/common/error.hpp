#pragma once

#include <stdexcept>
#include <string>

namespace netgame {

/// Raised when a caller passes arguments that violate an operation's
/// preconditions (bad index, shape mismatch, out-of-range coefficient).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical fault is detected at run time (NaN/inf in a
/// state, reward, network output or loss). The message carries the
/// diagnostics needed to locate the fault.
class Fault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ArgumentError(message);
}

}  // namespace netgame
