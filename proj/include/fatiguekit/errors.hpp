#pragma once

/**
 * @file errors.hpp
 * @brief Exception types thrown by fatiguekit.
 *
 * Every recoverable failure derives from fatiguekit::Error and carries a
 * short machine-readable kind string. Internal invariant violations throw
 * InvariantError, which derives from std::logic_error instead.
 */

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fatiguekit {

class Error : public std::runtime_error {
public:
  Error(std::string kind, const std::string &what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string &kind() const noexcept { return kind_; }

private:
  std::string kind_;
};

/// Invalid numeric argument (dt <= 0, negative accumulation, ...).
struct ParameterError : Error {
  explicit ParameterError(const std::string &what) : Error("parameter", what) {}
};

/// Input data rejected (non-finite samples, negative loads).
struct InputError : Error {
  explicit InputError(const std::string &what) : Error("input", what) {}
};

/// Evaluation requested outside the domain of a profile or series.
struct DomainError : Error {
  explicit DomainError(const std::string &what) : Error("domain", what) {}
};

/// Document does not match the expected structure.
struct SchemaError : Error {
  explicit SchemaError(const std::string &what) : Error("schema", what) {}
};

/// Inconsistent configuration (share fractions, missing standard times).
struct ConfigError : Error {
  explicit ConfigError(const std::string &what) : Error("config", what) {}
};

/// Series too short for the requested operation.
struct InsufficientDataError : Error {
  explicit InsufficientDataError(const std::string &what)
      : Error("insufficient-data", what) {}
};

/// Current capacity fell below the validity floor of the model.
struct CapacityExhaustedError : Error {
  explicit CapacityExhaustedError(const std::string &what)
      : Error("capacity-exhausted", what) {}
};

class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string &what)
      : Error("parse", "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class IoError : public Error {
public:
  IoError(std::string path, const std::string &what)
      : Error("io", path + ": " + what), path_(std::move(path)) {}

  const std::string &path() const noexcept { return path_; }

private:
  std::string path_;
};

struct InvariantError : std::logic_error {
  explicit InvariantError(const std::string &what) : std::logic_error(what) {}
};

} // namespace fatiguekit
