#pragma once

#include <stdexcept>
#include <string>

namespace dualsrc {

/// Raised when an input violates a documented precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a distribution cannot be built from the requested moments.
class ParameterizationError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised by the DP oracle when a truncated model would exceed its size limit.
class StateSpaceTooLarge : public std::length_error {
 public:
  StateSpaceTooLarge(const std::string& what, long long count)
      : std::length_error(what), count_(count) {}
  long long count() const noexcept { return count_; }

 private:
  long long count_;
};

}  // namespace dualsrc
