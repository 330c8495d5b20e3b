#pragma once

#include <stdexcept>
#include <string>

namespace lqb {

/// Bad caller input: parameter constraint, wrong dimension, malformed spec.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine could not produce a trustworthy answer.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Relaxation threshold not reached within the propagation window.
class NotConverged : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Steady state is not unique (more than one zero mode).
class DegenerateSteadyState : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace lqb
