#pragma once

#include <stdexcept>
#include <string>

namespace demmel {

// Bad arguments: violated preconditions, unsupported parameter combinations.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Anything that goes wrong while computing: quadrature that does not settle,
// overflow, cancellation beyond the precision budget, eigensolver stalls.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class OverflowError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class PrecisionLossError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw DomainError(message);
}

}  // namespace demmel
