#pragma once

// Operator commands. This is the surface every interface drives (the wire
// protocol, scripted agents, and trial replay all reduce to these values).

#include <optional>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

#include "aeroplan/flightpath.hpp"
#include "aeroplan/geometry.hpp"

namespace aeroplan {

// Rays travel un-normalized so a serialized command reparses bit-exactly.
struct RaySpec {
  Vec3 origin;
  Vec3 direction;

  Ray to_ray() const { return Ray(origin, direction); }
  friend bool operator==(const RaySpec&, const RaySpec&) = default;
};

struct AddWaypointCmd {
  Vec3 pos;
  std::optional<WaypointId> after;
  friend bool operator==(const AddWaypointCmd&, const AddWaypointCmd&) = default;
};

struct AddWaypointIndirectCmd {
  RaySpec pick_ray;
  RaySpec tilt_ray;
  friend bool operator==(const AddWaypointIndirectCmd&,
                         const AddWaypointIndirectCmd&) = default;
};

struct MoveWaypointCmd {
  WaypointId id = 0;
  Vec3 pos;
  friend bool operator==(const MoveWaypointCmd&, const MoveWaypointCmd&) = default;
};

struct DeleteWaypointCmd {
  WaypointId id = 0;
  friend bool operator==(const DeleteWaypointCmd&,
                         const DeleteWaypointCmd&) = default;
};

struct TakeoffCmd {
  friend bool operator==(const TakeoffCmd&, const TakeoffCmd&) = default;
};

struct LandCmd {
  friend bool operator==(const LandCmd&, const LandCmd&) = default;
};

struct JoystickCmd {
  double dx = 0.0;
  double dy = 0.0;
  double dz = 0.0;
  friend bool operator==(const JoystickCmd&, const JoystickCmd&) = default;
};

using Command = std::variant<AddWaypointCmd, AddWaypointIndirectCmd,
                             MoveWaypointCmd, DeleteWaypointCmd, TakeoffCmd,
                             LandCmd, JoystickCmd>;

// Wire type name ("add_waypoint", "takeoff", ...).
std::string_view command_type(const Command& command);

nlohmann::json command_payload(const Command& command);
// Throws kUnknownType for an unrecognised type, kProtocolError for a
// malformed payload.
Command command_from_payload(std::string_view type, const nlohmann::json& payload);
bool is_command_type(std::string_view type);

}  // namespace aeroplan
