#include "resispike/error.hpp"

namespace resispike {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonSymmetric: return "NonSymmetric";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::ZeroTrace: return "ZeroTrace";
    case ErrorCode::PoleTooClose: return "PoleTooClose";
    case ErrorCode::NotUnit: return "NotUnit";
    case ErrorCode::NotPsd: return "NotPsd";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::NotDetectable: return "NotDetectable";
    case ErrorCode::DegenerateBulk: return "DegenerateBulk";
    case ErrorCode::RootBracketFailure: return "RootBracketFailure";
    case ErrorCode::NoRoot: return "NoRoot";
    case ErrorCode::ComplexBranch: return "ComplexBranch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::AllZero: return "AllZero";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace resispike
