#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wassinc {

// Argument outside the mathematical domain of an operation (p < 1, R <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Size or dimension mismatch between inputs, or an empty container.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A non-finite coordinate appeared while advancing particles.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(std::size_t step, double time);

  std::size_t step() const { return step_; }
  double time() const { return time_; }

 private:
  std::size_t step_;
  double time_;
};

// Scenario files: missing keys, unknown catalog labels, bad values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The requested accuracy cannot be represented on the supplied time grid.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wassinc
