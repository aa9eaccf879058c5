#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gnlab {

// Stable numbering: these values are exported through the C API.
enum class ErrorCode : int {
  kOk = 0,
  kInvalidArgument = 1,
  kInvalidIndex = 2,
  kNegativeReciprocal = 3,
  kDegenerate = 4,
  kAlphaOutOfRange = 5,
  kNoMatchingFactor = 6,
  kSelfPowerGeqOne = 7,
  kSupportExceedsBox = 8,
  kAxisOutOfRange = 9,
  kGridTooCoarse = 10,
  kEmptyRegion = 11,
  kNonpositiveScale = 12,
  kEpsTooSmall = 13,
  kWindowEmpty = 14,
  kNoCrossing = 15,
  kZeroFunction = 16,
  kExponentMismatch = 17,
  kInadmissibleParams = 18,
  kGridUnconverged = 19,
  kConfigInvalid = 20,
  kContractFailed = 21,
  kIoError = 22,
  kParseError = 23,
};

std::string_view error_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace gnlab
