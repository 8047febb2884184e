#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace memlme {

enum class ErrorCode {
  kInvalidArgument,
  kNotInHull,
  kSingularHessian,
  kMaxIterExceeded,
  kDegenerateMetric,
  kParse,
  kIo,
  kNonManifoldEdge,
  kOrientation,
  kZeroNormal,
  kDegenerateFrame,
  kInsufficientNodes,
  kEmptyWindow,
  kMismatchedNodes,
  kModeMismatch,
  kTooManyFailures,
};

std::string_view to_string(ErrorCode code) noexcept;

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace memlme
