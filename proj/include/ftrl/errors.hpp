#pragma once

#include <stdexcept>
#include <string>

namespace ftrl {

/// Caller broke a documented precondition (length mismatch, out-of-range
/// argument, invalid configuration value).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed experiment configuration (unknown key, wrong type, bad value).
class ConfigError : public ContractError {
 public:
  using ContractError::ContractError;
};

/// A numerical routine could not deliver its postcondition (root bracket not
/// found, iteration cap reached, normalization drift).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adaptive quadrature stopped before reaching the requested tolerance.
/// Carries the best estimate obtained so far.
class QuadratureError : public NumericError {
 public:
  QuadratureError(const std::string& what, double best_value, double best_error)
      : NumericError(what), best_value_(best_value), best_error_(best_error) {}

  double best_value() const noexcept { return best_value_; }
  double best_error() const noexcept { return best_error_; }

 private:
  double best_value_;
  double best_error_;
};

}  // namespace ftrl
