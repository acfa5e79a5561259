#include "aeroplan/flightpath.hpp"

#include <algorithm>
#include <string>

#include "aeroplan/error.hpp"

namespace aeroplan {

FlightPath::FlightPath(Box bounds, BoundsPolicy policy, WaypointId first_id,
                       std::uint64_t revision)
    : bounds_(bounds), policy_(policy), revision_(revision), next_id_(first_id) {
  if (!(bounds.min.x <= bounds.max.x && bounds.min.y <= bounds.max.y &&
        bounds.min.z <= bounds.max.z)) {
    throw Error(ErrorCode::kInvalidArgument, "inverted path bounds");
  }
  if (first_id == 0) {
    throw Error(ErrorCode::kInvalidArgument, "waypoint ids start at 1");
  }
}

Vec3 FlightPath::admit(const Vec3& position) const {
  if (!is_finite(position)) {
    throw Error(ErrorCode::kInvalidArgument, "non-finite waypoint position");
  }
  if (bounds_.contains(position)) return position;
  if (policy_ == BoundsPolicy::kReject) {
    throw Error(ErrorCode::kOutOfBounds, "waypoint outside lab bounds");
  }
  return bounds_.clamp(position);
}

std::size_t FlightPath::require_index(WaypointId id) const {
  if (auto i = index_of(id)) return *i;
  throw Error(ErrorCode::kUnknownWaypoint,
              "no waypoint with id " + std::to_string(id));
}

Waypoint FlightPath::add_waypoint(const Vec3& position,
                                  const Placement& placement) {
  const Vec3 p = admit(position);
  auto insert_at = waypoints_.end();
  if (placement.after) {
    insert_at = waypoints_.begin() +
                static_cast<std::ptrdiff_t>(require_index(*placement.after)) + 1;
  }
  if (waypoints_.size() >= kMaxWaypoints) {
    throw Error(ErrorCode::kPathFull, "path holds at most 256 waypoints");
  }
  const Waypoint wp{next_id_++, p};
  waypoints_.insert(insert_at, wp);
  ++revision_;
  return wp;
}

Waypoint FlightPath::add_waypoint_indirect(const Ray& pick_ray,
                                           const Ray& tilt_ray) {
  const auto ground = intersect_ray_ground(pick_ray);
  if (!ground) {
    throw Error(ErrorCode::kNoGroundHit, "pick ray does not reach the floor");
  }
  const double z =
      height_from_tilt(tilt_ray, {ground->x, ground->y}, bounds_.ceiling());
  return add_waypoint({ground->x, ground->y, z});
}

void FlightPath::move_waypoint(WaypointId id, const Vec3& new_position) {
  const std::size_t i = require_index(id);
  waypoints_[i].position = admit(new_position);
  ++revision_;
}

void FlightPath::delete_waypoint(WaypointId id) {
  const std::size_t i = require_index(id);
  waypoints_.erase(waypoints_.begin() + static_cast<std::ptrdiff_t>(i));
  ++revision_;
}

Highlight FlightPath::highlight(const SelectionZone& zone) const {
  if (!(zone.radius > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "selection radius must be > 0");
  }
  Highlight out;
  for (std::size_t i = 0; i < waypoints_.size(); ++i) {
    if (in_selection_zone(zone, waypoints_[i].position)) {
      out.waypoints.push_back(waypoints_[i].id);
    }
    if (i > 0 && segment_in_zone(zone, waypoints_[i - 1].position,
                                 waypoints_[i].position)) {
      out.segments.push_back(i);
    }
  }
  return out;
}

std::vector<SightLine> FlightPath::sight_lines() const {
  std::vector<SightLine> out;
  out.reserve(waypoints_.size());
  for (const auto& wp : waypoints_) {
    out.push_back({wp.id, wp.position, {wp.position.x, wp.position.y, 0.0}});
  }
  return out;
}

std::vector<Vec3> FlightPath::positions() const {
  std::vector<Vec3> out;
  out.reserve(waypoints_.size());
  for (const auto& wp : waypoints_) out.push_back(wp.position);
  return out;
}

const Waypoint* FlightPath::find(WaypointId id) const {
  auto it = std::find_if(waypoints_.begin(), waypoints_.end(),
                         [id](const Waypoint& w) { return w.id == id; });
  return it == waypoints_.end() ? nullptr : &*it;
}

std::optional<std::size_t> FlightPath::index_of(WaypointId id) const {
  for (std::size_t i = 0; i < waypoints_.size(); ++i) {
    if (waypoints_[i].id == id) return i;
  }
  return std::nullopt;
}

}  // namespace aeroplan
