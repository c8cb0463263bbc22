#pragma once

#include <stdexcept>
#include <string>

namespace conflow {

// Numbering is part of the C ABI (see c_api.h); append only.
enum class ErrorCode : int {
  ok = 0,
  invalid_argument = 1,
  dimension_mismatch = 2,
  unsolvable_on_torus = 3,
  critical_point = 4,
  branch_discontinuity = 5,
  not_normalized = 6,
  non_real_input = 7,
  unsupported_order = 8,
  blow_up = 9,
  not_on_sphere = 10,
  not_null = 11,
  not_forward = 12,
  point_at_infinity = 13,
  degenerate_metric = 14,
  projection_leak = 15,
  not_normal = 16,
  not_implemented_dim = 17,
  not_integrable = 18,
  holonomy_defect = 19,
  conformal_constraint_violated = 20,
  reality_violation = 21,
  nonzero_normal_degree = 22,
  non_integer_degree = 23,
  conformal_drift = 24,
  not_isothermic = 25,
  kappa_vanishes = 26,
  not_unit = 27,
  not_constrained_willmore = 28,
  not_cmc = 29,
  non_constant = 30,
  non_periodic = 31,
  io_error = 32,
  config_error = 33,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace conflow
