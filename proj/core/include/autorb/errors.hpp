#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace autorb {

enum class ErrorCode {
  precondition,
  unsupported_derivative_order,
  zero_leading_coefficient,
  evaluation_overflow,
  no_coefficients,
  not_converged,
  no_safe_radius,
  ambiguous_count,
  inconsistent_moments,
  critical_orbit_point,
  none_found,
  orbit_incomplete,
  order_too_high,
  tied_moduli,
  l_near_one,
  near_pole,
  branch_tracking_failed,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorCode::precondition, what);
}

}  // namespace autorb
