#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tpekit {

// Base of every error the library throws. Each subclass maps to one
// failure category so callers (the CLI in particular) can pick exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input outside the mathematical domain of a model (Gent locking, θ range).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Query outside the sampled range of a data set.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Invalid arguments or violated type invariants.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Degenerate or invalid geometry (self-intersecting outline, hyperbolic fit).
class GeometryError : public Error {
 public:
  using Error::Error;
};

// An analysis that ran but could not produce its result (too few cycles,
// solver non-convergence).
class AnalysisError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line), detail_(what) {}

  std::size_t line() const noexcept { return line_; }
  // The message without the line prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

}  // namespace tpekit
