#pragma once

#include <stdexcept>
#include <string>

namespace hugenfold {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Vector/matrix shapes do not agree.
class DimensionError : public Error {
public:
  using Error::Error;
};

/// A caller-side precondition does not hold (bad data, not a bug).
class PreconditionError : public Error {
public:
  using Error::Error;
};

/// A configured search budget or size cap was exceeded. Never a verdict.
class BudgetError : public Error {
public:
  using Error::Error;
};

/// The objective decreases without bound along a feasible direction.
class UnboundedError : public Error {
public:
  using Error::Error;
};

/// Internal invariant broken (stale step, step cap in a terminating loop).
class InternalError : public Error {
public:
  using Error::Error;
};

/// Malformed JSON input; message carries the offending field path.
class ParseError : public Error {
public:
  using Error::Error;
};

}  // namespace hugenfold
