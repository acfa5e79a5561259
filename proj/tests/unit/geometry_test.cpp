#include "aeroplan/geometry.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "aeroplan/error.hpp"
#include "support/expect.hpp"

namespace aeroplan {
namespace {

using testing::expect_code;

constexpr double kTol = 1e-9;

void expect_near(const Vec3& a, const Vec3& b, double tol = kTol) {
  EXPECT_NEAR(a.x, b.x, tol);
  EXPECT_NEAR(a.y, b.y, tol);
  EXPECT_NEAR(a.z, b.z, tol);
}

TEST(RayGround, StraightDown) {
  const auto hit = intersect_ray_ground(Ray({0, 0, 2}, {0, 0, -1}));
  ASSERT_TRUE(hit);
  expect_near(*hit, {0, 0, 0});
}

TEST(RayGround, Oblique) {
  const auto hit = intersect_ray_ground(Ray({1, 1, 1}, normalized({1, 0, -1})));
  ASSERT_TRUE(hit);
  expect_near(*hit, {2, 1, 0});
}

TEST(RayGround, UpwardAndHorizontalMiss) {
  EXPECT_FALSE(intersect_ray_ground(Ray({0, 0, 1}, {0, 0, 1})));
  EXPECT_FALSE(intersect_ray_ground(Ray({0, 0, 1}, {1, 0, 0})));
}

TEST(RayGround, ZeroDirectionIsDegenerate) {
  expect_code(ErrorCode::kDegenerateRay, [] { Ray({0, 0, 1}, {0, 0, 0}); });
}

TEST(RayGround, HitLiesOnRayAndFloor) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const Vec3 o{3 * u(gen), 3 * u(gen), 3 * (u(gen) + 1.0)};
    const Ray ray(o, {u(gen), u(gen), u(gen) - 0.2});
    const auto hit = intersect_ray_ground(ray);
    if (!hit) {
      EXPECT_GE(ray.direction().z, 0.0);
      continue;
    }
    EXPECT_LT(std::abs(hit->z), 1e-12);
    const double t = dot(*hit - o, ray.direction());
    EXPECT_GT(t, 0.0);
    EXPECT_LT(distance(ray.at(t), *hit), 1e-9);
  }
}

TEST(Tilt, ClosedForm) {
  EXPECT_NEAR(height_from_tilt(Ray({0, 0, 1}, normalized({1, 0, 1})), {1, 0}, kLabSide),
              2.0, kTol);
}

TEST(Tilt, HorizontalKeepsOriginHeight) {
  EXPECT_NEAR(height_from_tilt(Ray({1, 1, 1.3}, {1, 0, 0}), {1, 1}, kLabSide), 1.3, kTol);
}

TEST(Tilt, ClampedAtCeiling) {
  EXPECT_DOUBLE_EQ(height_from_tilt(Ray({0, 0, 1}, normalized({1, 0, 5})), {1, 0}, kLabSide),
                   kLabSide);
}

TEST(Tilt, ClampedAtFloor) {
  EXPECT_DOUBLE_EQ(height_from_tilt(Ray({0, 0, 1}, {1, 0, -5}), {1, 0}, kLabSide), 0.0);
}

TEST(Tilt, VerticalRayIsDegenerate) {
  expect_code(ErrorCode::kDegenerateRay,
              [] { height_from_tilt(Ray({0, 0, 1}, {0, 0, 1}), {1, 0}, kLabSide); });
}

TEST(Tilt, NondecreasingInPitch) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec3 origin{3 * u(gen), 3 * u(gen), 0.5 + 2 * u(gen)};
    const Vec2 anchor{3 * u(gen), 3 * u(gen)};
    const double heading = 2 * M_PI * u(gen);
    double last = -1.0;
    for (int i = -89; i <= 89; ++i) {
      const double pitch = i * M_PI / 180.0;
      const Vec3 d{std::cos(pitch) * std::cos(heading), std::cos(pitch) * std::sin(heading),
                   std::sin(pitch)};
      const double h = height_from_tilt(Ray(origin, d), anchor, kLabSide);
      EXPECT_GE(h, last - 1e-12) << "pitch " << i;
      last = h;
    }
  }
}

TEST(Transform, Identity) {
  expect_near(transform_point({}, {1, 2, 3}, TransformDirection::kWorldToView), {1, 2, 3});
}

TEST(Transform, PureScale) {
  expect_near(transform_point({2.0, 0.0, 0.0, 0.0}, {1, 0, 1}, TransformDirection::kWorldToView),
              {2, 0, 2});
}

TEST(Transform, QuarterTurn) {
  expect_near(transform_point({1.0, M_PI / 2, 0.5, 0.0}, {1, 0, 1},
                              TransformDirection::kWorldToView),
              {0.5, 1, 1});
}

TEST(Transform, RejectsNonPositiveScale) {
  expect_code(ErrorCode::kInvalidArgument, [] {
    transform_point({0.0, 0.0, 0.0, 0.0}, {1, 0, 0}, TransformDirection::kWorldToView);
  });
}

EnvTransform random_transform(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return {0.05 + 5.0 * u(gen), 4 * M_PI * (u(gen) - 0.5), 10 * (u(gen) - 0.5),
          10 * (u(gen) - 0.5)};
}

TEST(Transform, RoundTripProperty) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 100000; ++i) {
    const auto t = random_transform(gen);
    const Vec3 p{u(gen), u(gen), u(gen)};
    const Vec3 v = transform_point(t, p, TransformDirection::kWorldToView);
    const Vec3 back = transform_point(t, v, TransformDirection::kViewToWorld);
    ASSERT_LT(distance(back, p), kTol) << "case " << i;
  }
}

TEST(Pinch, EqualGapsLeaveTransform) {
  const EnvTransform t{1.5, 0.3, 0.2, -0.1};
  EXPECT_EQ(pinch_scale(t, 0.2, 0.2, {1, 1, 1}), t);
}

TEST(Pinch, DoubleAtViewOrigin) {
  const auto t = pinch_scale({}, 0.2, 0.4, {0, 0, 0});
  EXPECT_NEAR(t.scale, 2.0, kTol);
  EXPECT_NEAR(t.tx, 0.0, kTol);
  EXPECT_NEAR(t.ty, 0.0, kTol);
  EXPECT_NEAR(t.yaw, 0.0, kTol);
}

TEST(Pinch, DegenerateGaps) {
  expect_code(ErrorCode::kDegenerateGesture, [] { pinch_scale({}, 0.0, 0.3, {}); });
  expect_code(ErrorCode::kDegenerateGesture, [] { pinch_scale({}, 0.2, 0.0, {}); });
}

TEST(Pinch, PivotFixedPointProperty) {
  std::mt19937_64 gen(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100000; ++i) {
    const auto t = random_transform(gen);
    const Vec3 left{4 * u(gen), 4 * u(gen), 2 * u(gen)};
    const Vec3 right{4 * u(gen), 4 * u(gen), 2 * u(gen)};
    const Vec3 pivot = pinch_pivot(left, right);
    const double g0 = 0.01 + u(gen);
    const double g1 = 0.01 + 2 * u(gen);
    const auto next = pinch_scale(t, g0, g1, pivot);
    // The world point under the pivot keeps its world xy; on the view floor
    // it is fixed in all three coordinates.
    const Vec3 floor_pivot{pivot.x, pivot.y, 0.0};
    const Vec3 before = transform_point(t, floor_pivot, TransformDirection::kViewToWorld);
    const Vec3 after = transform_point(next, floor_pivot, TransformDirection::kViewToWorld);
    ASSERT_LT(distance(before, after), kTol) << "case " << i;
    const Vec3 b3 = transform_point(t, pivot, TransformDirection::kViewToWorld);
    const Vec3 a3 = transform_point(next, pivot, TransformDirection::kViewToWorld);
    ASSERT_LT(std::hypot(b3.x - a3.x, b3.y - a3.y), kTol) << "case " << i;
    ASSERT_NEAR(next.scale, t.scale * g1 / g0, 1e-12 * next.scale);
  }
}

TEST(Rotate, PivotStaysPut) {
  const EnvTransform t{1.3, 0.2, 0.4, -0.7};
  const Vec3 pivot{1.0, 2.0, 0.0};
  const auto next = rotate_about(t, 0.9, pivot);
  EXPECT_NEAR(next.yaw, 1.1, kTol);
  expect_near(transform_point(t, pivot, TransformDirection::kViewToWorld),
              transform_point(next, pivot, TransformDirection::kViewToWorld));
}

TEST(Translate, HorizontalOnly) {
  const auto t = translate_horizontal({}, 0.5, -0.25);
  expect_near(transform_point(t, {1, 1, 1}, TransformDirection::kWorldToView), {1.5, 0.75, 1});
}

TEST(Selection, Examples) {
  const SelectionZone zone{{0, 0, 1}, 0.3};
  EXPECT_TRUE(in_selection_zone(zone, {0, 0, 1.2}));
  EXPECT_FALSE(in_selection_zone(zone, {1, 1, 1}));
  EXPECT_TRUE(segment_in_zone(zone, {-1, 0, 1}, {1, 0, 1}));
  EXPECT_FALSE(segment_in_zone(zone, {-1, 1, 1}, {1, 1, 1}));
}

TEST(Selection, InsideEndpointImpliesSegment) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 20000; ++i) {
    const SelectionZone zone{{u(gen), u(gen), u(gen)}, 0.5 * (u(gen) + 1.0)};
    const Vec3 p{u(gen), u(gen), u(gen)};
    const Vec3 q{5 * u(gen), 5 * u(gen), 5 * u(gen)};
    if (in_selection_zone(zone, p)) {
      ASSERT_TRUE(segment_in_zone(zone, p, q));
      ASSERT_TRUE(segment_in_zone(zone, q, p));
    }
  }
}

TEST(Selection, PointSegmentDistance) {
  EXPECT_NEAR(point_segment_distance({0, 1, 0}, {-1, 0, 0}, {1, 0, 0}), 1.0, kTol);
  EXPECT_NEAR(point_segment_distance({3, 0, 0}, {-1, 0, 0}, {1, 0, 0}), 2.0, kTol);
  EXPECT_NEAR(point_segment_distance({0, 0, 2}, {1, 1, 1}, {1, 1, 1}), std::sqrt(3.0), kTol);
}

}  // namespace
}  // namespace aeroplan
