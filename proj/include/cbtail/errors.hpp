#pragma once

#include <stdexcept>
#include <string>

namespace cbtail {

// Base of every error thrown by the library. `kind()` is a short stable tag
// used by the CLI for structured diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

// A model or law parameter lies outside its admissible domain.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error("domain", what) {}
};

// Tied observations; every estimator assumes continuous marginals.
class TieError : public Error {
 public:
  explicit TieError(const std::string& what) : Error("ties", what) {}
};

// Tail-estimator argument mapped outside the unit square with clamping off.
class RangeError : public Error {
 public:
  explicit RangeError(const std::string& what) : Error("range", what) {}
};

class NonPositiveWeightError : public Error {
 public:
  explicit NonPositiveWeightError(const std::string& what)
      : Error("weight", what) {}
};

class EmptyDistributionError : public Error {
 public:
  explicit EmptyDistributionError(const std::string& what)
      : Error("empty", what) {}
};

class InfeasibleTuningError : public Error {
 public:
  explicit InfeasibleTuningError(const std::string& what)
      : Error("tuning", what) {}
};

class UnsupportedModelError : public Error {
 public:
  explicit UnsupportedModelError(const std::string& what)
      : Error("unsupported", what) {}
};

// Numerical tail limit did not settle.
class ExtrapolationError : public Error {
 public:
  explicit ExtrapolationError(const std::string& what)
      : Error("extrapolation", what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config", what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("io", what) {}
};

}  // namespace cbtail
