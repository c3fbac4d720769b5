#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace surplus {

enum class ErrorCode {
  ZeroOrNegativeWeight,
  WeightsDoNotSumToOne,
  DimensionMismatch,
  InvalidSpec,
  UnsupportedProperty,
  UnsupportedFamily,
  PreconditionFailed,
  NegativeDual,
  PricingConstraintViolated,
  NonMonotoneAxis,
  SpecNotProper,
  HarnessError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ZeroOrNegativeWeight: return "ZeroOrNegativeWeight";
    case ErrorCode::WeightsDoNotSumToOne: return "WeightsDoNotSumToOne";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::UnsupportedProperty: return "UnsupportedProperty";
    case ErrorCode::UnsupportedFamily: return "UnsupportedFamily";
    case ErrorCode::PreconditionFailed: return "PreconditionFailed";
    case ErrorCode::NegativeDual: return "NegativeDual";
    case ErrorCode::PricingConstraintViolated: return "PricingConstraintViolated";
    case ErrorCode::NonMonotoneAxis: return "NonMonotoneAxis";
    case ErrorCode::SpecNotProper: return "SpecNotProper";
    case ErrorCode::HarnessError: return "HarnessError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace surplus
