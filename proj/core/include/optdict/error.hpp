#pragma once

#include <stdexcept>
#include <string>

namespace optdict {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input: bad lengths, non-monotone sequences,
/// schema violations, broken invariants in a loaded file.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Well-formed input for which no solution exists (K below the effective
/// rank, a length profile that is not majorized by the spectrum, ...).
class Infeasible : public Error {
 public:
  using Error::Error;
};

/// Filesystem failures.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Internal numerical breakdown (loss of orthogonality, negative square-root
/// argument beyond the clamp window).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace optdict
