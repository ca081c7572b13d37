#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace apwb {

/// Argument outside the mathematical domain of a function (negative density, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Feature not available for the given parameters (e.g. E-reconstruction at gamma = 1).
class UnsupportedError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// No positive discrete hydrostatic state exists for the requested data.
class EquilibriumError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a time step produces a non-finite value.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(std::size_t step_index, double time, const std::string& what)
      : std::runtime_error(what), step_index_(step_index), time_(time) {}

  std::size_t step_index() const noexcept { return step_index_; }
  double time() const noexcept { return time_; }

 private:
  std::size_t step_index_;
  double time_;
};

}  // namespace apwb
