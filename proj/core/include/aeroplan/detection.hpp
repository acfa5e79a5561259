#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aeroplan/environment.hpp"
#include "aeroplan/geometry.hpp"
#include "aeroplan/vehicle.hpp"

namespace aeroplan {

// +1 when moving along the hoop normal, -1 against it. Either counts.
using TraversalDirection = int;

// A traversal happens when the step from p_prev to p_curr changes side of the
// hoop plane and the crossing point lies within inner_radius - body_radius of
// the hoop centre. Sides are half-open (offset >= 0 is the + side), so the
// test is symmetric under reversing the step.
std::optional<TraversalDirection> detect_traversal(const Vec3& p_prev,
                                                   const Vec3& p_curr,
                                                   const Hoop& hoop,
                                                   double body_radius);

enum class CollisionKind { kRotorHoop, kBodyHoop, kGround };

std::string_view to_string(CollisionKind kind);
std::optional<CollisionKind> collision_kind_from_string(std::string_view name);

struct Collision {
  CollisionKind kind;
  std::string hoop;  // empty for kGround

  friend bool operator==(const Collision&, const Collision&) = default;
};

// Distance from p to the hoop's core circle.
double distance_to_core_circle(const Vec3& p, const Hoop& hoop);

// Rotor hubs are tested against the tube (yaw ignored), the body sphere
// against the torus, and the floor only while flying.
std::vector<Collision> detect_collisions(const DroneState& state,
                                         const LabEnvironment& env,
                                         double ground_contact_height);

}  // namespace aeroplan
