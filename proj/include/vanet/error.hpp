#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vanet {

enum class ErrorCode {
  invalid_argument,
  out_of_range,
  degenerate_chain,
  nyquist_violation,
  bad_interval,
  bad_window,
  non_summable,
  too_large,
  insufficient_data,
  support_mismatch,
  numerical_instability,
  config,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& what);

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) raise(code, what);
}

}  // namespace vanet
