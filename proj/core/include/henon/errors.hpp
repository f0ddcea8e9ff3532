#pragma once

#include <stdexcept>
#include <string>

namespace henon {

/// Violated precondition on user-supplied parameters.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Any failure of a numerical procedure on valid input.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IntegrationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The shot stayed positive up to r_max.
class NoZeroError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class BracketError : public NumericalError {
 public:
  BracketError(const std::string& what, double lo, double hi)
      : NumericalError(what), lo_(lo), hi_(hi) {}
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

/// Requested a Morse index exactly at a degenerate parameter value.
class DegeneratePointError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace henon
