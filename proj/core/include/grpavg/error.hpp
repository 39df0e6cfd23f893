#pragma once

#include <stdexcept>
#include <string>

namespace grpavg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Operands disagree on the size of the state space.
class DimensionError : public Error {
public:
  using Error::Error;
};

/// A mathematical precondition failed: zero mass, non-stationarity,
/// a non-invariant target, an invalid measure, and so on.
class DomainError : public Error {
public:
  using Error::Error;
};

/// A size cap was exceeded (group closure, subset enumeration, dense
/// extended spaces, mixing horizon).
class LimitError : public Error {
public:
  using Error::Error;
};

} // namespace grpavg
