#include "cex/error.hpp"

namespace cex {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::length_mismatch: return "LengthMismatch";
    case ErrorCode::not_normalized: return "NotNormalized";
    case ErrorCode::label_clash: return "LabelClash";
    case ErrorCode::layout_mismatch: return "LayoutMismatch";
    case ErrorCode::unknown_label: return "UnknownLabel";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::not_an_isometry: return "NotAnIsometry";
    case ErrorCode::invalid_density: return "InvalidDensity";
    case ErrorCode::identical_states: return "IdenticalStates";
    case ErrorCode::domain_error: return "DomainError";
    case ErrorCode::wrong_input: return "WrongInput";
    case ErrorCode::control_dim_mismatch: return "ControlDimMismatch";
    case ErrorCode::dimension_too_small: return "DimensionTooSmall";
    case ErrorCode::net_too_large: return "NetTooLarge";
    case ErrorCode::empty_net: return "EmptyNet";
    case ErrorCode::missing_registers: return "MissingRegisters";
    case ErrorCode::too_large: return "TooLarge";
    case ErrorCode::unsupported_strategy: return "UnsupportedStrategy";
    case ErrorCode::not_unitary: return "NotUnitary";
    case ErrorCode::not_a_qubit: return "NotAQubit";
    case ErrorCode::backend_unsupported: return "BackendUnsupported";
    case ErrorCode::invalid_argument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace cex
