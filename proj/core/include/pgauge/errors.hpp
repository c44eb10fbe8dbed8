#pragma once

#include <stdexcept>
#include <string>

namespace pgauge {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent vector/matrix shapes.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A parameter outside its documented domain (e.g. non-decreasing SLOPE weights).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Expanding the generator matrix of a gauge would exceed the materialization cap.
class GeneratorBlowup : public Error {
 public:
  using Error::Error;
};

/// Difference-matrix patterns need p >= 2 (TV) or p >= 3 (trend filtering).
class DimensionTooSmall : public Error {
 public:
  using Error::Error;
};

/// Simplex pivoting stalled or the basis became numerically singular.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// An LP that must be feasible was not (e.g. target outside col(X)).
class Infeasible : public Error {
 public:
  using Error::Error;
};

/// An iterative solver hit its iteration limit before certifying optimality.
class NotConverged : public Error {
 public:
  using Error::Error;
};

/// Malformed CSV or configuration input.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace pgauge
