#pragma once

#include <stdexcept>
#include <string>

namespace fmab {

enum class ErrorCode {
  kInvalidDimension,
  kInvalidInstance,
  kDimensionMismatch,
  kMissingConstant,
  kIncompatible,
  kInvalidArgument,
  kConfiguration,
  kStopped,
  kIo,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// CLI and the Python bindings can map it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fmab
