#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cex {

enum class ErrorCode {
  length_mismatch,
  not_normalized,
  label_clash,
  layout_mismatch,
  unknown_label,
  dimension_mismatch,
  not_an_isometry,
  invalid_density,
  identical_states,
  domain_error,
  wrong_input,
  control_dim_mismatch,
  dimension_too_small,
  net_too_large,
  empty_net,
  missing_registers,
  too_large,
  unsupported_strategy,
  not_unitary,
  not_a_qubit,
  backend_unsupported,
  invalid_argument,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI exit-code mapping) can dispatch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace cex
