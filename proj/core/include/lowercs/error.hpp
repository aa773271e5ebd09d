#pragma once

#include <stdexcept>
#include <string>

namespace lowercs {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A combinatorial or memory size limit was exceeded (enumeration budget,
/// index-set cardinality).
class SizeError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Dimensions of two operands disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition on an input does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Input data is unusable, e.g. a non-finite function value.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A numerical approximation (quadrature) is not accurate enough.
class AccuracyError : public Error {
 public:
  using Error::Error;
};

/// An iterative method failed to reach its target.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Malformed user input (CLI arguments, config or data files).
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace lowercs
