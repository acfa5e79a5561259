#include "aeroplan/error.hpp"

namespace aeroplan {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kOutOfBounds: return "out_of_bounds";
    case ErrorCode::kUnknownWaypoint: return "unknown_waypoint";
    case ErrorCode::kPathFull: return "path_full";
    case ErrorCode::kNoGroundHit: return "no_ground_hit";
    case ErrorCode::kDegenerateRay: return "degenerate_ray";
    case ErrorCode::kDegenerateGesture: return "degenerate_gesture";
    case ErrorCode::kEmptyPath: return "empty_path";
    case ErrorCode::kInvalidTimestep: return "invalid_timestep";
    case ErrorCode::kUnstableGains: return "unstable_gains";
    case ErrorCode::kInvalidModeTransition: return "invalid_mode_transition";
    case ErrorCode::kNotFlying: return "not_flying";
    case ErrorCode::kIncompleteLog: return "incomplete_log";
    case ErrorCode::kDegenerateVariance: return "degenerate_variance";
    case ErrorCode::kZeroTotalVariance: return "zero_total_variance";
    case ErrorCode::kProtocolError: return "protocol_error";
    case ErrorCode::kUnknownType: return "unknown_type";
    case ErrorCode::kUnauthenticated: return "unauthenticated";
    case ErrorCode::kBusy: return "busy";
    case ErrorCode::kConfigError: return "config_error";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail),
      code_(code),
      detail_(detail) {}

}  // namespace aeroplan
