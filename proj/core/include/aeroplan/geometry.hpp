#pragma once

// Interaction geometry shared by every planning interface: rays, ground
// picking, tilt-to-height, selection spheres and the world/view transform
// used when the operator grabs, scales and spins the environment model.
//
// World frame: metres, z up, origin at a floor corner of the lab.

#include <cmath>
#include <optional>

namespace aeroplan {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }

  friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
  friend constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
  friend constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
  friend constexpr Vec3 operator/(const Vec3& a, double s) {
    return {a.x / s, a.y / s, a.z / s};
  }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }
inline bool is_finite(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}
// Throws kInvalidArgument for a zero or non-finite vector.
Vec3 normalized(const Vec3& v);

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

// Axis-aligned box.
struct Box {
  Vec3 min;
  Vec3 max;

  bool contains(const Vec3& p) const;
  Vec3 clamp(const Vec3& p) const;
  double ceiling() const { return max.z; }
  friend bool operator==(const Box&, const Box&) = default;
};

// 10 ft cube.
inline constexpr double kLabSide = 3.048;
constexpr Box lab_box(double side = kLabSide) {
  return Box{{0.0, 0.0, 0.0}, {side, side, side}};
}

// A half-line with unit direction. Construction normalizes the direction.
class Ray {
 public:
  // Throws kDegenerateRay when the direction has zero length.
  Ray(const Vec3& origin, const Vec3& direction);

  const Vec3& origin() const { return origin_; }
  const Vec3& direction() const { return direction_; }
  Vec3 at(double t) const { return origin_ + direction_ * t; }

 private:
  Vec3 origin_;
  Vec3 direction_;
};

// First point with t > 0 where the ray meets the floor plane z = 0.
std::optional<Vec3> intersect_ray_ground(const Ray& ray);

// Height designated by tilting a ray after an anchor has been picked on the
// floor: the ray's z where its horizontal projection passes closest to the
// anchor (never behind the origin), clamped to [0, ceiling].
// Throws kDegenerateRay for a vertical ray.
double height_from_tilt(const Ray& ray, const Vec2& anchor, double ceiling);

// Uniform scale, then yaw about +z, then horizontal translation.
struct EnvTransform {
  double scale = 1.0;
  double yaw = 0.0;
  double tx = 0.0;
  double ty = 0.0;

  friend bool operator==(const EnvTransform&, const EnvTransform&) = default;
};

enum class TransformDirection { kWorldToView, kViewToWorld };

Vec3 transform_point(const EnvTransform& t, const Vec3& p,
                     TransformDirection direction);

// Two-handed pull gesture. Scale is multiplied by current/initial gap and the
// translation is re-solved so the world point vertically under the pivot
// stays put (z is never translated, so a pivot above the view floor keeps its
// world xy while its world height follows the new scale).
// Throws kDegenerateGesture if initial_gap < 1e-6 or current_gap <= 0.
EnvTransform pinch_scale(const EnvTransform& t, double initial_gap,
                         double current_gap, const Vec3& pivot_view);

// Midpoint of the two hands at gesture start.
inline Vec3 pinch_pivot(const Vec3& left_hand, const Vec3& right_hand) {
  return (left_hand + right_hand) * 0.5;
}

// Joystick spin about the vertical axis through pivot_view.
EnvTransform rotate_about(const EnvTransform& t, double delta_yaw,
                          const Vec3& pivot_view);

// Joystick pan in the view's horizontal plane.
EnvTransform translate_horizontal(const EnvTransform& t, double dx, double dy);

struct SelectionZone {
  Vec3 center;
  double radius = 0.0;
};

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b);

bool in_selection_zone(const SelectionZone& zone, const Vec3& p);
bool segment_in_zone(const SelectionZone& zone, const Vec3& a, const Vec3& b);

}  // namespace aeroplan
