#include "aeroplan/detection.hpp"

#include <cmath>

namespace aeroplan {

std::optional<TraversalDirection> detect_traversal(const Vec3& p_prev,
                                                   const Vec3& p_curr,
                                                   const Hoop& hoop,
                                                   double body_radius) {
  const double s0 = dot(p_prev - hoop.center, hoop.normal);
  const double s1 = dot(p_curr - hoop.center, hoop.normal);
  const bool side0 = s0 >= 0.0;
  const bool side1 = s1 >= 0.0;
  if (side0 == side1) return std::nullopt;

  const double u = s0 / (s0 - s1);
  const Vec3 crossing = p_prev + (p_curr - p_prev) * u;
  const Vec3 offset = crossing - hoop.center;
  // Drop the residual along the normal; the crossing lies in the plane.
  const Vec3 in_plane = offset - hoop.normal * dot(offset, hoop.normal);
  if (norm(in_plane) > hoop.inner_radius - body_radius) return std::nullopt;
  return side1 ? 1 : -1;
}

std::string_view to_string(CollisionKind kind) {
  switch (kind) {
    case CollisionKind::kRotorHoop: return "rotor_hoop";
    case CollisionKind::kBodyHoop: return "body_hoop";
    case CollisionKind::kGround: return "ground";
  }
  return "ground";
}

std::optional<CollisionKind> collision_kind_from_string(std::string_view name) {
  for (auto k : {CollisionKind::kRotorHoop, CollisionKind::kBodyHoop,
                 CollisionKind::kGround}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

double distance_to_core_circle(const Vec3& p, const Hoop& hoop) {
  const Vec3 d = p - hoop.center;
  const double along = dot(d, hoop.normal);
  const double radial = norm(d - hoop.normal * along);
  const double gap = radial - hoop.core_radius();
  return std::sqrt(gap * gap + along * along);
}

std::vector<Collision> detect_collisions(const DroneState& state,
                                         const LabEnvironment& env,
                                         double ground_contact_height) {
  std::vector<Collision> out;
  for (const auto& hoop : env.hoops) {
    bool rotor = false;
    for (const auto& offset : state.rotor_offsets) {
      if (distance_to_core_circle(state.position + offset, hoop) <=
          hoop.tube_radius) {
        rotor = true;
        break;
      }
    }
    if (rotor) out.push_back({CollisionKind::kRotorHoop, hoop.label});
    if (distance_to_core_circle(state.position, hoop) <=
        hoop.tube_radius + state.body_radius) {
      out.push_back({CollisionKind::kBodyHoop, hoop.label});
    }
  }
  if (state.mode == FlightMode::kFlying &&
      state.position.z <= ground_contact_height) {
    out.push_back({CollisionKind::kGround, {}});
  }
  return out;
}

}  // namespace aeroplan
