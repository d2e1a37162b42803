#pragma once

#include <stdexcept>
#include <string>

namespace nilcurv {

/// Caller passed something that violates an operation's preconditions
/// (dimension mismatch, index out of range, zero vector, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Metric data violates a family invariant (asymmetric psi, torsion, nvars).
class ConstructionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Plane or basis is degenerate within tolerance.
class DegeneracyError : public InputError {
 public:
  using InputError::InputError;
};

/// Sampler exhausted its retry budget.
class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An eigen/SVD routine failed to converge, or an internal consistency
/// check failed.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nilcurv
