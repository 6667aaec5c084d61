#pragma once

#include <stdexcept>
#include <string>

namespace secaloha {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parameter values outside the model's domain.
struct DomainError : Error {
  using Error::Error;
};

/// No Monte Carlo sample fell in the conditioning set of the target user.
struct ZeroConditioningHits : DomainError {
  using DomainError::DomainError;
};

/// A rate estimate came out non-positive, so the secrecy ratio is undefined.
struct DegenerateCapacity : DomainError {
  using DomainError::DomainError;
};

/// The threshold quadratic has no real root for these parameters.
struct NoRealRoot : DomainError {
  using DomainError::DomainError;
};

/// Too few trajectory points for a drift verdict.
struct InsufficientData : DomainError {
  using DomainError::DomainError;
};

/// The joint secrecy-stability region is empty.
struct InfeasibleRegion : Error {
  using Error::Error;
};

/// Exhaustive search found no feasible grid point.
struct EmptyFeasibleSet : Error {
  using Error::Error;
};

/// Operation only supports a different user count (typically N = 2).
struct DimensionError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& msg, int line_no = 0)
      : Error(line_no > 0 ? "line " + std::to_string(line_no) + ": " + msg : msg),
        line(line_no) {}
  int line;
};

}  // namespace secaloha
