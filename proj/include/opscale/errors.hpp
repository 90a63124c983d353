#pragma once

#include <stdexcept>
#include <string>

namespace opscale {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A matrix expected to be symmetric positive definite is not (failed
/// Cholesky pivot, nonpositive eigenvalue, or non-finite entries).
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

/// A triangular factor has a zero or non-finite diagonal entry.
class Singular : public Error {
 public:
  using Error::Error;
};

/// The symmetric eigensolver did not converge.
class NoConvergence : public Error {
 public:
  using Error::Error;
};

/// Frame recovery was handed a right factor that is not diagonal.
class NotDiagonal : public Error {
 public:
  using Error::Error;
};

/// A generated frame row has (numerically) zero norm.
class DegenerateRow : public Error {
 public:
  using Error::Error;
};

/// Bad argument values: dimension mismatch, out-of-range parameters.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed problem or trace file. The message names the file and the
/// offending line or field.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace opscale
