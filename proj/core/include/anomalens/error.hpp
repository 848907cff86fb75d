#pragma once

#include <stdexcept>
#include <string>

namespace anomalens {

/// Base class for all errors raised by the library. `exit_code()` is the
/// process exit status the command-line tool reports for this error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 2; }
};

/// Bad arguments, unknown commands, missing configuration.
class UsageError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 1; }
};

/// Malformed input: dimension mismatches, bad CSV rows, unknown labels.
class DataError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// Non-finite values during training or optimization.
class NumericalError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

}  // namespace anomalens
