#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace aeroplan {

enum class ErrorCode {
  kInvalidArgument,
  kOutOfBounds,
  kUnknownWaypoint,
  kPathFull,
  kNoGroundHit,
  kDegenerateRay,
  kDegenerateGesture,
  kEmptyPath,
  kInvalidTimestep,
  kUnstableGains,
  kInvalidModeTransition,
  kNotFlying,
  kIncompleteLog,
  kDegenerateVariance,
  kZeroTotalVariance,
  kProtocolError,
  kUnknownType,
  kUnauthenticated,
  kBusy,
  kConfigError,
};

// snake_case name used on the wire and in diagnostics.
std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace aeroplan
