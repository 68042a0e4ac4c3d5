#pragma once

#include <stdexcept>
#include <string>

namespace dualvqe {

// User-facing input problems: malformed files, bad configs, invalid arguments.
struct InputError : std::invalid_argument {
  explicit InputError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Requests that exceed the dense desk-scale limits (e.g. densifying too many qubits).
struct ResourceError : std::runtime_error {
  explicit ResourceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite values or numerically impossible states detected mid-computation.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace dualvqe
