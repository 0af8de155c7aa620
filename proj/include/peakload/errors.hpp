#pragma once

#include <stdexcept>
#include <string>

namespace peakload {

enum class ErrorCode {
  invalid_input,
  empty_set,
  unbounded_set,
  dimension_too_large,
  numeric_breakdown,
  not_convex,
  bad_mean,
  bad_delta,
  bad_params,
  bad_alpha,
  bad_var,
  saddle_violated,
  no_capacity,
  not_equilibrium,
  wrong_demand_mode,
};

const char* to_string(ErrorCode code);

// All library failures that are not solver statuses surface as this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace peakload
