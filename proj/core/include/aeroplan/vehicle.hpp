#pragma once

// Simulated quadrotor and its flight stack. A planner turns waypoints into a
// constant-speed piecewise-linear reference; a saturated PD tracker on a
// double integrator follows it under bounded additive disturbance. The
// tracking error bound (TEB) certifying that follower is measured by an
// adversarial sweep rather than computed by reachability analysis.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "aeroplan/flightpath.hpp"
#include "aeroplan/geometry.hpp"
#include "aeroplan/random.hpp"

namespace aeroplan {

enum class FlightMode { kGrounded, kTakingOff, kFlying, kLanding };

std::string_view to_string(FlightMode mode);
std::optional<FlightMode> flight_mode_from_string(std::string_view name);

struct TrackerParams {
  double kp = 4.0;           // 1/s^2
  double kd = 4.0;           // 1/s
  double accel_max = 2.0;    // m/s^2, per axis
  double disturb_max = 0.2;  // m/s^2, vector magnitude
  double teb = 0.0;          // m

  // Throws kUnstableGains unless kp, kd, accel_max > 0, kd^2 >= 4 kp,
  // disturb_max >= 0 and teb >= 0.
  void validate() const;
};

// Crazyflie-scale body sphere and rotor hubs in the body frame.
struct Airframe {
  double body_radius = 0.07;
  std::array<Vec3, 4> rotor_offsets{{{0.046, 0.046, 0.0},
                                     {-0.046, 0.046, 0.0},
                                     {-0.046, -0.046, 0.0},
                                     {0.046, -0.046, 0.0}}};
};

struct DroneState {
  Vec3 position;
  Vec3 velocity;
  Vec3 setpoint;
  FlightMode mode = FlightMode::kGrounded;
  double body_radius = Airframe{}.body_radius;
  std::array<Vec3, 4> rotor_offsets = Airframe{}.rotor_offsets;

  static DroneState grounded_at(const Vec3& pad, const Airframe& airframe = {});
};

// Constant-speed reference through a polyline.
class Trajectory {
 public:
  // Throws kEmptyPath for no points, kInvalidArgument for speed <= 0.
  Trajectory(std::vector<Vec3> points, double speed);

  double duration() const { return vertex_times_.back(); }
  double speed() const { return speed_; }
  const std::vector<Vec3>& points() const { return points_; }

  // Clamped to the end points outside [0, duration].
  Vec3 position(double t) const;
  // Zero outside [0, duration).
  Vec3 velocity(double t) const;
  // Number of polyline vertices whose arrival time is <= t.
  std::size_t vertices_reached(double t) const;

 private:
  std::size_t segment_at(double t) const;

  std::vector<Vec3> points_;
  std::vector<double> vertex_times_;
  double speed_;
};

// Throws kEmptyPath.
Trajectory plan_trajectory(const FlightPath& path, double v_plan);
Trajectory plan_trajectory(std::span<const Vec3> points, double v_plan);

// One semi-implicit Euler step of the tracked double integrator:
//   a = sat(kp (ref_pos - pos) + kd (ref_vel - vel)) + disturbance
// The disturbance is limited to params.disturb_max in magnitude.
// Throws kInvalidTimestep unless dt is in (0, 0.05].
DroneState tracker_step(const DroneState& state, const TrackerParams& params,
                        const Vec3& reference_pos, const Vec3& reference_vel,
                        const Vec3& disturbance, double dt);

// Piecewise-constant random disturbance: a random direction held for a random
// interval. With full_magnitude the magnitude is always `magnitude`,
// otherwise uniform in [0, magnitude].
class DisturbanceProcess {
 public:
  DisturbanceProcess(double magnitude, std::uint64_t seed,
                     bool full_magnitude = false, double min_hold = 0.05,
                     double max_hold = 1.0);

  Vec3 sample(double dt);

 private:
  Rng rng_;
  double magnitude_;
  bool full_magnitude_;
  double min_hold_;
  double max_hold_;
  double remaining_ = 0.0;
  Vec3 current_;
};

struct TebSweep {
  std::size_t episodes = 10000;
  double dt = 0.01;
  std::uint64_t seed = 0x5eedf00dULL;
  double safety_factor = 1.25;
  int corners = 3;           // direction changes per episode
  bool stop_at_end = true;   // final stop is one more velocity change
  double settle_time = 2.0;  // simulated after a stop
  double min_segment = 0.2;  // m
  double max_segment = 1.5;  // m
};

// Worst deviation observed over the sweep, times the safety factor. Episodes
// start on the reference with matched velocity; disturbances are held at
// disturb_max magnitude. Throws kUnstableGains.
double compute_teb(const TrackerParams& params, double v_plan,
                   const TebSweep& sweep = {});

struct JoystickInput {
  double dx = 0.0;
  double dy = 0.0;
  double dz = 0.0;

  // Components limited to [-1, 1]; NaN becomes 0.
  JoystickInput clamped() const;
};

inline constexpr double kDeadZone = 0.1;
inline constexpr double kFullDeflectionOffset = 1.0;  // m

// Per-axis offset: 0 inside the dead zone, then linear up to one metre.
double deflection_offset(double deflection);

// Setpoint for assisted manual control. Zero effective input keeps the
// current setpoint (hover); otherwise the setpoint is offset from the current
// position. Result is clamped to bounds. Throws kNotFlying.
Vec3 manual_setpoint(const DroneState& state, const JoystickInput& input,
                     const Box& bounds);

struct VehicleConfig {
  TrackerParams tracker;
  Airframe airframe;
  double dt = 0.01;
  double v_plan = 0.5;
  double v_climb = 0.5;
  double hover_altitude = 0.5;
  double gravity = 9.81;
  double ground_contact_height = 0.01;
};

// The simulated vehicle with its mode machine:
// Grounded -> TakingOff -> Flying -> Landing -> Grounded.
class Vehicle {
 public:
  Vehicle(VehicleConfig config, const Vec3& pad);

  const DroneState& state() const { return state_; }
  const VehicleConfig& config() const { return config_; }

  // Throw kInvalidModeTransition outside the mode cycle.
  void takeoff();
  void land();

  // Throw kNotFlying.
  void follow(Trajectory trajectory);
  void hold(const Vec3& setpoint);

  bool following() const { return trajectory_.has_value(); }
  const std::optional<Trajectory>& trajectory() const { return trajectory_; }
  double trajectory_time() const { return trajectory_time_; }
  // Vertices of the last followed trajectory the reference has reached.
  std::size_t vertices_reached() const { return vertices_reached_; }

  // Rotor strike: thrust is lost and the airframe falls until it rests on
  // the floor.
  void cut_motors();
  bool motors_cut() const { return motors_cut_; }

  void step(const Vec3& disturbance);

 private:
  VehicleConfig config_;
  DroneState state_;
  std::optional<Trajectory> trajectory_;
  double trajectory_time_ = 0.0;
  std::size_t vertices_reached_ = 0;
  double takeoff_altitude_ = 0.0;
  bool motors_cut_ = false;
};

}  // namespace aeroplan
