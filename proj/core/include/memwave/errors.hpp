#pragma once

#include <stdexcept>
#include <string>

namespace memwave {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A constructor or operation precondition on user-supplied parameters
/// failed. The message names the violated inequality.
class ParameterViolation : public Error {
  public:
    using Error::Error;
};

/// Argument outside the mathematical domain of the operation (e.g. t < 0).
class DomainError : public Error {
  public:
    using Error::Error;
};

/// Evaluation requested at a point where the quantity is undefined or
/// unbounded (e.g. a_ddot at t = 0 for a kernel singular there).
class SingularityError : public Error {
  public:
    using Error::Error;
};

/// An iterative numerical procedure failed to converge.
class NumericalFailure : public Error {
  public:
    using Error::Error;
};

/// Two time series passed to a binary operation have different lengths.
class LengthMismatch : public Error {
  public:
    using Error::Error;
};

/// A field does not match the grid it is used with.
class SizeMismatch : public Error {
  public:
    using Error::Error;
};

/// The diagonal factor of a second-kind Volterra step vanished.
class SingularStep : public Error {
  public:
    using Error::Error;
};

/// Time step violates the CFL stability bound.
class CflViolation : public Error {
  public:
    using Error::Error;
};

/// A NaN or Inf appeared in a field during time stepping.
class NonFiniteField : public Error {
  public:
    using Error::Error;
};

/// A fixed-point iteration reached its cap without meeting tolerance.
class NoConvergence : public Error {
  public:
    using Error::Error;
};

/// The requested statistic is undefined for identically-zero input data.
class DegenerateData : public Error {
  public:
    using Error::Error;
};

/// An operation requires the full (untruncated) history of a run.
class HistoryTruncated : public Error {
  public:
    using Error::Error;
};

/// Writing a run artifact to disk failed.
class PersistenceError : public Error {
  public:
    using Error::Error;
};

/// Operation not available for this input (e.g. multiplier field on a
/// custom domain).
class Unsupported : public Error {
  public:
    using Error::Error;
};

} // namespace memwave
