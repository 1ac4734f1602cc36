#ifndef FRACLAP_ERRORS_HPP
#define FRACLAP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fraclap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid grid setup (odd or zero size, mismatched sizes).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Parameter outside the domain of an operator (negative order for the
/// fractional Laplacian, non-positive alpha for derivatives, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Input violates a documented precondition (typically: non-zero mean).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Bad argument value (projection size too large, params outside box, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf or other breakdown during an iterative computation.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Image or file I/O failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace fraclap

#endif  // FRACLAP_ERRORS_HPP
