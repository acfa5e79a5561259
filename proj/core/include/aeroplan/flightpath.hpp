#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "aeroplan/geometry.hpp"

namespace aeroplan {

using WaypointId = std::uint64_t;

struct Waypoint {
  WaypointId id = 0;
  Vec3 position;
  friend bool operator==(const Waypoint&, const Waypoint&) = default;
};

// Vertical guide from a waypoint straight down to the floor.
struct SightLine {
  WaypointId waypoint_id = 0;
  Vec3 top;
  Vec3 ground_point;
};

enum class BoundsPolicy { kClamp, kReject };

// Where a new waypoint goes: appended, or directly after an existing one.
struct Placement {
  std::optional<WaypointId> after;

  static Placement end() { return {}; }
  static Placement after_id(WaypointId id) { return {id}; }
};

// Segment k joins waypoints k-1 and k, so valid segment indices are
// 1 .. size()-1.
struct Highlight {
  std::vector<WaypointId> waypoints;
  std::vector<std::size_t> segments;
};

// The operator-authored plan. Ids are assigned from a monotonically
// increasing counter and never reused; every mutation bumps revision().
// Copies are independent snapshots.
class FlightPath {
 public:
  static constexpr std::size_t kMaxWaypoints = 256;

  explicit FlightPath(Box bounds = lab_box(),
                      BoundsPolicy policy = BoundsPolicy::kClamp,
                      WaypointId first_id = 1, std::uint64_t revision = 0);

  // Direct placement (VR placement point, or map pick + height slider).
  // Throws kOutOfBounds (reject policy), kUnknownWaypoint, kPathFull.
  Waypoint add_waypoint(const Vec3& position,
                        const Placement& placement = Placement::end());

  // Ray-pick a floor point, then tilt to set the height.
  // Throws kNoGroundHit, kDegenerateRay, plus add_waypoint's errors.
  Waypoint add_waypoint_indirect(const Ray& pick_ray, const Ray& tilt_ray);

  void move_waypoint(WaypointId id, const Vec3& new_position);
  void delete_waypoint(WaypointId id);

  Highlight highlight(const SelectionZone& zone) const;
  std::vector<SightLine> sight_lines() const;

  std::span<const Waypoint> waypoints() const { return waypoints_; }
  std::vector<Vec3> positions() const;
  std::size_t size() const { return waypoints_.size(); }
  bool empty() const { return waypoints_.empty(); }
  std::uint64_t revision() const { return revision_; }
  WaypointId next_id() const { return next_id_; }
  const Box& bounds() const { return bounds_; }
  BoundsPolicy policy() const { return policy_; }

  const Waypoint* find(WaypointId id) const;
  std::optional<std::size_t> index_of(WaypointId id) const;

 private:
  Vec3 admit(const Vec3& position) const;
  std::size_t require_index(WaypointId id) const;

  Box bounds_;
  BoundsPolicy policy_;
  std::vector<Waypoint> waypoints_;
  std::uint64_t revision_ = 0;
  WaypointId next_id_;
};

}  // namespace aeroplan
