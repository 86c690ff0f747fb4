#pragma once

#include <stdexcept>
#include <string>

namespace posebench {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: malformed files, out-of-range parameters, contract violations
/// by the caller. The CLI maps these to exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A direction was requested from a zero-length vector.
class DegenerateDirection : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// The pose softmax was asked to propagate through a non-foreground block.
class MaskingViolation : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// An internal consistency check failed. The CLI maps these to exit code 2.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace posebench
