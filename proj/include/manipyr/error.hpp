#pragma once

#include <stdexcept>
#include <string>

namespace manipyr {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: wrong shapes, out-of-range parameters, invariant violations.
/// The CLI maps these to exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver stopped without meeting its tolerance.
/// The CLI maps these to exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class InvalidXi : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class LengthMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class TagMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InvalidPoint : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class EmptyInput : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// log/geodesic requested outside the principal-log domain, or an enhanced
/// detail vector leaves it.
class OutOfInjectivityRadius : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NotReversible : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class AliasingDetected : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace manipyr
