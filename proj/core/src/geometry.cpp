#include "aeroplan/geometry.hpp"

#include <algorithm>

#include "aeroplan/error.hpp"

namespace aeroplan {
namespace {

constexpr double kMinHorizontal = 1e-9;
constexpr double kMinGestureGap = 1e-6;

void check_transform(const EnvTransform& t) {
  if (!(t.scale > 0.0) || !std::isfinite(t.scale) || !std::isfinite(t.yaw) ||
      !std::isfinite(t.tx) || !std::isfinite(t.ty)) {
    throw Error(ErrorCode::kInvalidArgument,
                "environment transform needs a positive finite scale");
  }
}

// Translation that puts world point w (horizontal part) under view point
// pivot for the given scale and yaw.
EnvTransform resolve_translation(double scale, double yaw, const Vec3& w,
                                 const Vec3& pivot) {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  EnvTransform out{scale, yaw, 0.0, 0.0};
  out.tx = pivot.x - scale * (c * w.x - s * w.y);
  out.ty = pivot.y - scale * (s * w.x + c * w.y);
  return out;
}

}  // namespace

Vec3 normalized(const Vec3& v) {
  const double n = norm(v);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorCode::kInvalidArgument, "cannot normalize a zero vector");
  }
  return v / n;
}

bool Box::contains(const Vec3& p) const {
  return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y &&
         p.z >= min.z && p.z <= max.z;
}

Vec3 Box::clamp(const Vec3& p) const {
  return {std::clamp(p.x, min.x, max.x), std::clamp(p.y, min.y, max.y),
          std::clamp(p.z, min.z, max.z)};
}

Ray::Ray(const Vec3& origin, const Vec3& direction) : origin_(origin) {
  const double n = norm(direction);
  if (!(n > 0.0) || !std::isfinite(n) || !is_finite(origin)) {
    throw Error(ErrorCode::kDegenerateRay, "ray direction must be nonzero");
  }
  direction_ = direction / n;
}

std::optional<Vec3> intersect_ray_ground(const Ray& ray) {
  const double dz = ray.direction().z;
  if (dz == 0.0) return std::nullopt;
  const double t = -ray.origin().z / dz;
  if (!(t > 0.0)) return std::nullopt;
  Vec3 hit = ray.at(t);
  hit.z = 0.0;
  return hit;
}

double height_from_tilt(const Ray& ray, const Vec2& anchor, double ceiling) {
  const Vec3& o = ray.origin();
  const Vec3& d = ray.direction();
  const double h2 = d.x * d.x + d.y * d.y;
  if (h2 < kMinHorizontal * kMinHorizontal) {
    throw Error(ErrorCode::kDegenerateRay,
                "vertical ray cannot designate a height");
  }
  // Closest horizontal approach of o.xy + t * d.xy to the anchor.
  double t = ((anchor.x - o.x) * d.x + (anchor.y - o.y) * d.y) / h2;
  t = std::max(t, 0.0);
  return std::clamp(o.z + t * d.z, 0.0, ceiling);
}

Vec3 transform_point(const EnvTransform& t, const Vec3& p,
                     TransformDirection direction) {
  check_transform(t);
  const double c = std::cos(t.yaw);
  const double s = std::sin(t.yaw);
  if (direction == TransformDirection::kWorldToView) {
    const double x = t.scale * p.x;
    const double y = t.scale * p.y;
    return {c * x - s * y + t.tx, s * x + c * y + t.ty, t.scale * p.z};
  }
  const double hx = p.x - t.tx;
  const double hy = p.y - t.ty;
  return {(c * hx + s * hy) / t.scale, (-s * hx + c * hy) / t.scale,
          p.z / t.scale};
}

EnvTransform pinch_scale(const EnvTransform& t, double initial_gap,
                         double current_gap, const Vec3& pivot_view) {
  check_transform(t);
  if (!(initial_gap >= kMinGestureGap) || !(current_gap > 0.0) ||
      !std::isfinite(current_gap)) {
    throw Error(ErrorCode::kDegenerateGesture,
                "hand gap too small for a scale gesture");
  }
  if (current_gap == initial_gap) return t;
  const Vec3 w =
      transform_point(t, pivot_view, TransformDirection::kViewToWorld);
  return resolve_translation(t.scale * (current_gap / initial_gap), t.yaw, w,
                             pivot_view);
}

EnvTransform rotate_about(const EnvTransform& t, double delta_yaw,
                          const Vec3& pivot_view) {
  check_transform(t);
  const Vec3 w =
      transform_point(t, pivot_view, TransformDirection::kViewToWorld);
  return resolve_translation(t.scale, t.yaw + delta_yaw, w, pivot_view);
}

EnvTransform translate_horizontal(const EnvTransform& t, double dx,
                                  double dy) {
  check_transform(t);
  EnvTransform out = t;
  out.tx += dx;
  out.ty += dy;
  return out;
}

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double u = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  // Endpoint distances bound the rounded interior result from above.
  return std::min({distance(p, a + ab * u), distance(p, a), distance(p, b)});
}

bool in_selection_zone(const SelectionZone& zone, const Vec3& p) {
  return distance(p, zone.center) <= zone.radius;
}

bool segment_in_zone(const SelectionZone& zone, const Vec3& a, const Vec3& b) {
  return point_segment_distance(zone.center, a, b) <= zone.radius;
}

}  // namespace aeroplan
