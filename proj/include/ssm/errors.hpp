#pragma once

#include <stdexcept>
#include <string>

namespace ssm {

/// Invalid configuration or argument (maps to CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// The requested construction is impossible for the given dimensions.
class CapabilityError : public std::runtime_error {
 public:
  explicit CapabilityError(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite or otherwise unusable intermediate value.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Argument outside the mathematical domain of a function (e.g. a pole).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// File could not be written (maps to CLI exit code 3).
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Too many realizations failed numerically during a sweep (exit code 4).
class FailureBudgetError : public std::runtime_error {
 public:
  explicit FailureBudgetError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ssm
