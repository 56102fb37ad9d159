#pragma once

#include <stdexcept>
#include <string>

namespace hyplab {

/// Precondition or type-invariant violation (bad radius, y <= 0, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input file or unsupported schema version.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical integral missed its tolerance. Carries the best estimate.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double estimate, double error)
      : std::runtime_error(what), estimate_(estimate), error_(error) {}
  double estimate() const noexcept { return estimate_; }
  double error() const noexcept { return error_; }

 private:
  double estimate_;
  double error_;
};

}  // namespace hyplab
