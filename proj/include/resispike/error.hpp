#pragma once

#include <stdexcept>
#include <string>

namespace resispike {

enum class ErrorCode {
  NonSymmetric,
  ConvergenceFailure,
  ZeroTrace,
  PoleTooClose,
  NotUnit,
  NotPsd,
  DegenerateSpectrum,
  NotDetectable,
  DegenerateBulk,
  RootBracketFailure,
  NoRoot,
  ComplexBranch,
  DimensionMismatch,
  AllZero,
  ParseError,
  ConfigError,
  InvalidArgument,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace resispike
