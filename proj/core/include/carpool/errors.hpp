#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace carpool {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Latitude/longitude outside the Mercator domain.
class ProjectionError : public Error {
 public:
  using Error::Error;
};

/// A solution references indices the instance does not have.
class InvalidSolutionError : public Error {
 public:
  using Error::Error;
};

/// Text or file content that could not be parsed. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Parsed index outside the instance.
class BoundsError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Instance too large for exhaustive enumeration.
class CapacityExceededError : public Error {
 public:
  using Error::Error;
};

class NoPathError : public Error {
 public:
  using Error::Error;
};

/// An objective below the claimed optimum: a solver or oracle bug.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class RenderError : public Error {
 public:
  using Error::Error;
};

/// Failure of a solution proposer. Aborts a schedule run.
class ProposerError : public Error {
 public:
  using Error::Error;
};

class FixtureExhaustedError : public ProposerError {
 public:
  using ProposerError::ProposerError;
};

class TransportError : public ProposerError {
 public:
  TransportError(const std::string& what, int retries)
      : ProposerError(what + " (after " + std::to_string(retries) + " retries)"), retries_(retries) {}
  int retries() const noexcept { return retries_; }

 private:
  int retries_;
};

class StatusError : public ProposerError {
 public:
  StatusError(int status, int retries, const std::string& body)
      : ProposerError("endpoint returned HTTP " + std::to_string(status) + " after " +
                      std::to_string(retries) + " retries: " + body.substr(0, 200)),
        status_(status),
        retries_(retries) {}
  int status() const noexcept { return status_; }
  int retries() const noexcept { return retries_; }

 private:
  int status_;
  int retries_;
};

class DecodeError : public ProposerError {
 public:
  using ProposerError::ProposerError;
};

}  // namespace carpool
