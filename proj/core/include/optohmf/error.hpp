#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace optohmf {

/// Machine-readable failure class. The CLI maps each to an exit code.
enum class ErrorCategory {
  parameter,
  config,
  grid,
  numerical,
  fit,
  io,
  domain,
};

std::string_view to_string(ErrorCategory category) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what)
      : Error(ErrorCategory::parameter, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorCategory::config, what) {}
};

class GridError : public Error {
 public:
  explicit GridError(const std::string& what)
      : Error(ErrorCategory::grid, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorCategory::numerical, what) {}
};

class FitError : public Error {
 public:
  FitError(const std::string& what, double residual = 0.0)
      : Error(ErrorCategory::fit, what), residual_(residual) {}

  /// RMS residual of the failed fit, 0 when no fit was attempted.
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what)
      : Error(ErrorCategory::domain, what) {}
};

}  // namespace optohmf
