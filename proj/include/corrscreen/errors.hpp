#pragma once

#include <stdexcept>
#include <string>

namespace corrscreen {

/// Base class of every error raised by the library. The CLI maps these to
/// exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Structurally invalid input file (ragged rows, duplicate keys, schema).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A cell or document that cannot be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Unsupported schema version in a JSON document.
class VersionError : public Error {
 public:
  using Error::Error;
};

/// A series with zero variance, for which correlation is undefined.
class DegenerateSeriesError : public Error {
 public:
  using Error::Error;
};

/// Caller violated a documented precondition.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Covariance matrix is not positive semidefinite.
class CovarianceError : public Error {
 public:
  using Error::Error;
};

}  // namespace corrscreen
