#include "vanet/error.hpp"

namespace vanet {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::out_of_range: return "OutOfRange";
    case ErrorCode::degenerate_chain: return "DegenerateChain";
    case ErrorCode::nyquist_violation: return "NyquistViolation";
    case ErrorCode::bad_interval: return "BadInterval";
    case ErrorCode::bad_window: return "BadWindow";
    case ErrorCode::non_summable: return "NonSummable";
    case ErrorCode::too_large: return "TooLarge";
    case ErrorCode::insufficient_data: return "InsufficientData";
    case ErrorCode::support_mismatch: return "SupportMismatch";
    case ErrorCode::numerical_instability: return "NumericalInstability";
    case ErrorCode::config: return "ConfigError";
  }
  return "Unknown";
}

void raise(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(to_string(code)) + ": " + what);
}

}  // namespace vanet
