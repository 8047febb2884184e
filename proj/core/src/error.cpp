#include "memlme/error.hpp"

namespace memlme {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNotInHull: return "NotInHull";
    case ErrorCode::kSingularHessian: return "SingularHessian";
    case ErrorCode::kMaxIterExceeded: return "MaxIterExceeded";
    case ErrorCode::kDegenerateMetric: return "DegenerateMetric";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kNonManifoldEdge: return "NonManifoldEdge";
    case ErrorCode::kOrientation: return "OrientationError";
    case ErrorCode::kZeroNormal: return "ZeroNormal";
    case ErrorCode::kDegenerateFrame: return "DegenerateFrame";
    case ErrorCode::kInsufficientNodes: return "InsufficientNodes";
    case ErrorCode::kEmptyWindow: return "EmptyWindow";
    case ErrorCode::kMismatchedNodes: return "MismatchedNodes";
    case ErrorCode::kModeMismatch: return "ModeMismatch";
    case ErrorCode::kTooManyFailures: return "TooManyFailures";
  }
  return "Unknown";
}

}  // namespace memlme
