#pragma once

#include <stdexcept>
#include <string>

namespace mfgs {

struct ModelError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SizeError : std::length_error {
  using std::length_error::length_error;
};

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Iterative solver gave up; residual is the last measured defect.
struct ConvergenceError : std::runtime_error {
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
        residual(residual) {}
  double residual;
};

}  // namespace mfgs
