// Exception types: validation_error for malformed inputs, verification_error for failed runtime checks.
#pragma once

#include <stdexcept>
#include <string>

namespace circleflow {

// Input data violates a precondition or an invariant (exit code 1 territory).
struct validation_error : std::runtime_error {
  explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

// A computed result failed its own verification (exit code 2 territory).
struct verification_error : std::runtime_error {
  explicit verification_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace circleflow
