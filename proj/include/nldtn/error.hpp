#pragma once

#include <stdexcept>
#include <string>

namespace nldtn {

enum class ErrorCode {
  InvalidDim,
  InvalidResolution,
  InvalidDomain,
  GridMismatch,
  InconsistentTrace,
  InvalidParam,
  NotPositive,
  NoConvergence,
  NonContraction,
  NotNull,
  InconsistentSamples,
  BadIndices,
  NotNormalized,
  QuadratureBudget,
  NonMonotone,
  IllConditioned,
  MissingProbe,
  NumericRange,
  ConfigInvalid,
  IoError,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so that
// callers (notably the experiment runner) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace nldtn
