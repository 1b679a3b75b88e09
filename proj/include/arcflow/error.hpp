#pragma once

#include <stdexcept>
#include <string>

namespace arcflow {

enum class ErrorKind {
  argument,
  structural,
  range,
  horizon_violation,
  tolerance_not_met,
  config,
  io,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what)
      : Error(ErrorKind::argument, what) {}
};

/// Malformed points, dimension mismatches, non-finite values.
class StructuralError : public Error {
 public:
  explicit StructuralError(const std::string& what)
      : Error(ErrorKind::structural, what) {}
};

class RangeError : public Error {
 public:
  explicit RangeError(const std::string& what)
      : Error(ErrorKind::range, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorKind::config, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

/// A discretized trajectory left the probe ball B(a, r) before the horizon.
/// Usually means the speed bound rho was underestimated.
class HorizonViolation : public Error {
 public:
  HorizonViolation(const std::string& what, double exit_time)
      : Error(ErrorKind::horizon_violation, what), exit_time_(exit_time) {}

  double exit_time() const noexcept { return exit_time_; }

 private:
  double exit_time_;
};

}  // namespace arcflow
