#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fdi {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violates a documented invariant (duplicate ids, dimension mismatch,
/// unknown identifier, non-binary cell).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain of a function (e.g. zero sensors).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Bundled data does not match its recorded checksum.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

/// A residual specification cannot be turned into an executable observer.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Malformed CSV or JSON input. Line and column are 1-based; 0 means unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column = 0);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Integration produced a non-finite state.
class SimulationError : public Error {
 public:
  SimulationError(const std::string& message, double time, std::string fault_id = {});

  /// First sample time at which a non-finite value was observed.
  double time() const noexcept { return time_; }
  /// Fault active in the failing scenario, empty for fault-free runs.
  const std::string& fault_id() const noexcept { return fault_id_; }

 private:
  double time_;
  std::string fault_id_;
};

}  // namespace fdi
