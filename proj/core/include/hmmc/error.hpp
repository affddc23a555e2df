#pragma once

#include <stdexcept>
#include <string>

namespace hmmc {

// Base class for every error raised by the library. The CLI maps the
// concrete subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dimension mismatch, out-of-range index, non-stochastic row, bad argument.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A requested enumeration exceeds the configured cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Solver configuration that cannot produce a well-defined run.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent instance file. `where` carries the position
// (line:column) or the JSON field path.
class ValidationError : public Error {
 public:
  ValidationError(std::string where, const std::string& what)
      : Error(where + ": " + what), where_(std::move(where)) {}

  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

}  // namespace hmmc
