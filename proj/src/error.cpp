#include "stochnet/error.hpp"

namespace stochnet {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroTotalStrength: return "ZeroTotalStrength";
    case ErrorCode::IsolatedSpecies: return "IsolatedSpecies";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::NonFiniteSample: return "NonFiniteSample";
    case ErrorCode::DegreeTooHigh: return "DegreeTooHigh";
    case ErrorCode::BlowUp: return "BlowUp";
    case ErrorCode::TooFewRealizations: return "TooFewRealizations";
    case ErrorCode::DegenerateScale: return "DegenerateScale";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::MissingManifest: return "MissingManifest";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace stochnet
