#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace posauth {

/// Coarse failure categories. The CLI reports these verbatim in its
/// machine-readable error line.
enum class ErrorKind {
  invalid_argument,
  insufficient_coverage,
  degenerate_geometry,
  non_convergence,
  undefined_metric,
  config,
  io,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(ErrorKind::invalid_argument, what) {}
};

/// Fewer than the requested number of RSUs lie inside the LoS range.
class InsufficientCoverage : public Error {
 public:
  explicit InsufficientCoverage(const std::string& what)
      : Error(ErrorKind::insufficient_coverage, what) {}
};

/// Anchor layout does not determine a position (collinear or nearly so).
class DegenerateGeometry : public Error {
 public:
  DegenerateGeometry(const std::string& what, double condition_number)
      : Error(ErrorKind::degenerate_geometry, what), condition_number_(condition_number) {}
  double condition_number() const noexcept { return condition_number_; }

 private:
  double condition_number_;
};

class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double kkt_violation)
      : Error(ErrorKind::non_convergence, what), kkt_violation_(kkt_violation) {}
  double kkt_violation() const noexcept { return kkt_violation_; }

 private:
  double kkt_violation_;
};

class UndefinedMetric : public Error {
 public:
  explicit UndefinedMetric(const std::string& what) : Error(ErrorKind::undefined_metric, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

}  // namespace posauth
