#include "gnlab/error.hpp"

namespace gnlab {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kOk: return "OK";
    case ErrorCode::kInvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::kInvalidIndex: return "INVALID_INDEX";
    case ErrorCode::kNegativeReciprocal: return "NEGATIVE_RECIPROCAL";
    case ErrorCode::kDegenerate: return "DEGENERATE";
    case ErrorCode::kAlphaOutOfRange: return "ALPHA_OUT_OF_RANGE";
    case ErrorCode::kNoMatchingFactor: return "NO_MATCHING_FACTOR";
    case ErrorCode::kSelfPowerGeqOne: return "SELF_POWER_GEQ_ONE";
    case ErrorCode::kSupportExceedsBox: return "SUPPORT_EXCEEDS_BOX";
    case ErrorCode::kAxisOutOfRange: return "AXIS_OUT_OF_RANGE";
    case ErrorCode::kGridTooCoarse: return "GRID_TOO_COARSE";
    case ErrorCode::kEmptyRegion: return "EMPTY_REGION";
    case ErrorCode::kNonpositiveScale: return "NONPOSITIVE_SCALE";
    case ErrorCode::kEpsTooSmall: return "EPS_TOO_SMALL";
    case ErrorCode::kWindowEmpty: return "WINDOW_EMPTY";
    case ErrorCode::kNoCrossing: return "NO_CROSSING";
    case ErrorCode::kZeroFunction: return "ZERO_FUNCTION";
    case ErrorCode::kExponentMismatch: return "EXPONENT_MISMATCH";
    case ErrorCode::kInadmissibleParams: return "INADMISSIBLE_PARAMS";
    case ErrorCode::kGridUnconverged: return "GRID_UNCONVERGED";
    case ErrorCode::kConfigInvalid: return "CONFIG_INVALID";
    case ErrorCode::kContractFailed: return "CONTRACT_FAILED";
    case ErrorCode::kIoError: return "IO_ERROR";
    case ErrorCode::kParseError: return "PARSE_ERROR";
  }
  return "UNKNOWN";
}

}  // namespace gnlab
