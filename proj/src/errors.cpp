#include "vtol/errors.hpp"

namespace vtol {

namespace {

std::string join_fields(const std::vector<std::string>& fields) {
  std::string out = "invalid configuration:";
  for (const auto& f : fields) {
    out += "\n  - ";
    out += f;
  }
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> fields)
    : std::runtime_error(join_fields(fields)), fields_(std::move(fields)) {}

NumericalBlowup::NumericalBlowup(std::size_t step, const std::string& what)
    : std::runtime_error("non-finite value at step " + std::to_string(step) + ": " + what),
      step_(step) {}

}  // namespace vtol
