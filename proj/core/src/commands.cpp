#include "aeroplan/commands.hpp"

#include <string>

#include "aeroplan/environment.hpp"
#include "aeroplan/error.hpp"

namespace aeroplan {

using nlohmann::json;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

json ray_json(const RaySpec& r) {
  return json{{"origin", r.origin}, {"direction", r.direction}};
}

RaySpec ray_from(const json& j) {
  return {j.at("origin").get<Vec3>(), j.at("direction").get<Vec3>()};
}

void require_object(const json& payload) {
  if (!payload.is_object()) {
    throw Error(ErrorCode::kProtocolError, "payload must be an object");
  }
}

}  // namespace

std::string_view command_type(const Command& command) {
  return std::visit(
      Overloaded{
          [](const AddWaypointCmd&) { return std::string_view("add_waypoint"); },
          [](const AddWaypointIndirectCmd&) {
            return std::string_view("add_waypoint_indirect");
          },
          [](const MoveWaypointCmd&) { return std::string_view("move_waypoint"); },
          [](const DeleteWaypointCmd&) {
            return std::string_view("delete_waypoint");
          },
          [](const TakeoffCmd&) { return std::string_view("takeoff"); },
          [](const LandCmd&) { return std::string_view("land"); },
          [](const JoystickCmd&) { return std::string_view("joystick"); },
      },
      command);
}

bool is_command_type(std::string_view type) {
  return type == "add_waypoint" || type == "add_waypoint_indirect" ||
         type == "move_waypoint" || type == "delete_waypoint" ||
         type == "takeoff" || type == "land" || type == "joystick";
}

json command_payload(const Command& command) {
  return std::visit(
      Overloaded{
          [](const AddWaypointCmd& c) {
            json j{{"pos", c.pos}};
            if (c.after) j["after"] = *c.after;
            return j;
          },
          [](const AddWaypointIndirectCmd& c) {
            return json{{"pick_ray", ray_json(c.pick_ray)},
                        {"tilt_ray", ray_json(c.tilt_ray)}};
          },
          [](const MoveWaypointCmd& c) {
            return json{{"id", c.id}, {"pos", c.pos}};
          },
          [](const DeleteWaypointCmd& c) { return json{{"id", c.id}}; },
          [](const TakeoffCmd&) { return json::object(); },
          [](const LandCmd&) { return json::object(); },
          [](const JoystickCmd& c) {
            return json{{"dx", c.dx}, {"dy", c.dy}, {"dz", c.dz}};
          },
      },
      command);
}

Command command_from_payload(std::string_view type, const json& payload) {
  if (!is_command_type(type)) {
    throw Error(ErrorCode::kUnknownType, "unknown command " + std::string(type));
  }
  try {
    require_object(payload);
    if (type == "add_waypoint") {
      AddWaypointCmd c{payload.at("pos").get<Vec3>(), std::nullopt};
      if (auto it = payload.find("after"); it != payload.end() && !it->is_null()) {
        c.after = it->get<WaypointId>();
      }
      return c;
    }
    if (type == "add_waypoint_indirect") {
      return AddWaypointIndirectCmd{ray_from(payload.at("pick_ray")),
                                    ray_from(payload.at("tilt_ray"))};
    }
    if (type == "move_waypoint") {
      return MoveWaypointCmd{payload.at("id").get<WaypointId>(),
                             payload.at("pos").get<Vec3>()};
    }
    if (type == "delete_waypoint") {
      return DeleteWaypointCmd{payload.at("id").get<WaypointId>()};
    }
    if (type == "takeoff") return TakeoffCmd{};
    if (type == "land") return LandCmd{};
    return JoystickCmd{payload.at("dx").get<double>(), payload.at("dy").get<double>(),
                       payload.at("dz").get<double>()};
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kProtocolError,
                std::string(type) + " payload: " + e.what());
  }
}

}  // namespace aeroplan
