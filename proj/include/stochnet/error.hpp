#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stochnet {

enum class ErrorCode {
  InvalidParameter,
  DimensionMismatch,
  ZeroTotalStrength,
  IsolatedSpecies,
  ParseError,
  NonFiniteState,
  NonFiniteSample,
  DegreeTooHigh,
  BlowUp,
  TooFewRealizations,
  DegenerateScale,
  ConfigError,
  MissingManifest,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

  ErrorCode code() const noexcept { return code_; }
  /// Message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

/// Raised when an integration trajectory leaves the representable range.
class BlowUpError : public Error {
 public:
  BlowUpError(double time, const std::string& what) : Error(ErrorCode::BlowUp, what), time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace stochnet
