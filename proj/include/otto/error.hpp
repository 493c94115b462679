#ifndef OTTO_ERROR_HPP
#define OTTO_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace otto {

enum class ErrorCode {
  InvalidParams,
  DegenerateSpectrum,
  NonpositiveTemperature,
  OutOfRange,
  NotConverged,
  InvalidState,
  ZeroHeat,
  InvalidFrequency,
  StepUnderflow,
  NotReached,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::NonpositiveTemperature: return "NonpositiveTemperature";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::ZeroHeat: return "ZeroHeat";
    case ErrorCode::InvalidFrequency: return "InvalidFrequency";
    case ErrorCode::StepUnderflow: return "StepUnderflow";
    case ErrorCode::NotReached: return "NotReached";
  }
  return "Unknown";
}

/// Single exception type for the library; `code()` tells callers which
/// contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// Validation failures are caller mistakes; everything else is numeric.
  bool is_validation() const noexcept {
    return code_ == ErrorCode::InvalidParams || code_ == ErrorCode::NonpositiveTemperature ||
           code_ == ErrorCode::OutOfRange || code_ == ErrorCode::InvalidFrequency ||
           code_ == ErrorCode::InvalidState;
  }

 private:
  ErrorCode code_;
};

}  // namespace otto

#endif  // OTTO_ERROR_HPP
