#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace vtol {

/// Raised when an input violates a documented precondition (non-rotation matrix,
/// non-antisymmetric argument to vex, non-positive time step, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Landmark configuration cannot determine attitude and position
/// (fewer than three features, or all of them collinear).
class ObservabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The requested thrust direction is degenerate (F = [0, 0, c] with c >= g).
class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Scenario configuration rejected; `fields()` lists every offending entry.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> fields);

  const std::vector<std::string>& fields() const noexcept { return fields_; }

 private:
  std::vector<std::string> fields_;
};

/// A NaN or Inf appeared in the simulation state.
class NumericalBlowup : public std::runtime_error {
 public:
  NumericalBlowup(std::size_t step, const std::string& what);

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace vtol
