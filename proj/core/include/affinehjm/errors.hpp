#pragma once

#include <stdexcept>
#include <string>

namespace affinehjm {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Incompatible matrix or grid dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Input outside the mathematical domain of an operation, e.g. a matrix
/// required to lie in the positive semidefinite cone does not.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Evaluation point outside a stored grid or solution horizon.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: non-convergence, cone escape, overflow.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Parameter set rejected by validation.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace affinehjm
