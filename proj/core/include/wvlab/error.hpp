#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wvlab {

enum class ErrorCode {
  kNonAnalytic,
  kBadParam,
  kPhasesTooShort,
  kDomain,
  kNumeric,
  kExhausted,
};

std::string_view to_string(ErrorCode code);

// Every library failure is reported through this type; `code()` identifies
// the contract that was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonAnalytic: return "NON_ANALYTIC";
    case ErrorCode::kBadParam: return "BAD_PARAM";
    case ErrorCode::kPhasesTooShort: return "PHASES_TOO_SHORT";
    case ErrorCode::kDomain: return "DOMAIN";
    case ErrorCode::kNumeric: return "NUMERIC";
    case ErrorCode::kExhausted: return "EXHAUSTED";
  }
  return "UNKNOWN";
}

}  // namespace wvlab
