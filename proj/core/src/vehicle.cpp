#include "aeroplan/vehicle.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "aeroplan/error.hpp"

namespace aeroplan {
namespace {

constexpr double kMaxTimestep = 0.05;
constexpr double kArrivalTolerance = 1e-9;

double saturate(double value, double limit) {
  return std::clamp(value, -limit, limit);
}

}  // namespace

std::string_view to_string(FlightMode mode) {
  switch (mode) {
    case FlightMode::kGrounded: return "grounded";
    case FlightMode::kTakingOff: return "taking_off";
    case FlightMode::kFlying: return "flying";
    case FlightMode::kLanding: return "landing";
  }
  return "grounded";
}

std::optional<FlightMode> flight_mode_from_string(std::string_view name) {
  for (auto m : {FlightMode::kGrounded, FlightMode::kTakingOff,
                 FlightMode::kFlying, FlightMode::kLanding}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

void TrackerParams::validate() const {
  const bool ok = kp > 0.0 && kd > 0.0 && kd * kd >= 4.0 * kp &&
                  accel_max > 0.0 && disturb_max >= 0.0 && teb >= 0.0 &&
                  std::isfinite(kp) && std::isfinite(kd) &&
                  std::isfinite(accel_max) && std::isfinite(disturb_max);
  if (!ok) {
    throw Error(ErrorCode::kUnstableGains,
                "tracker needs kp, kd > 0 with kd^2 >= 4 kp");
  }
}

DroneState DroneState::grounded_at(const Vec3& pad, const Airframe& airframe) {
  DroneState s;
  s.position = {pad.x, pad.y, 0.0};
  s.setpoint = s.position;
  s.body_radius = airframe.body_radius;
  s.rotor_offsets = airframe.rotor_offsets;
  return s;
}

// --- Trajectory -----------------------------------------------------------

Trajectory::Trajectory(std::vector<Vec3> points, double speed)
    : points_(std::move(points)), speed_(speed) {
  if (points_.empty()) {
    throw Error(ErrorCode::kEmptyPath, "trajectory needs a waypoint");
  }
  if (!(speed > 0.0) || !std::isfinite(speed)) {
    throw Error(ErrorCode::kInvalidArgument, "planner speed must be > 0");
  }
  vertex_times_.reserve(points_.size());
  vertex_times_.push_back(0.0);
  double length = 0.0;
  for (std::size_t i = 1; i < points_.size(); ++i) {
    length += distance(points_[i - 1], points_[i]);
    vertex_times_.push_back(length / speed_);
  }
}

std::size_t Trajectory::segment_at(double t) const {
  // Last vertex with time <= t, limited to a valid segment start.
  auto it = std::upper_bound(vertex_times_.begin(), vertex_times_.end(), t);
  std::size_t i = static_cast<std::size_t>(it - vertex_times_.begin());
  i = i == 0 ? 0 : i - 1;
  return std::min(i, points_.size() - 2);
}

Vec3 Trajectory::position(double t) const {
  if (points_.size() == 1 || t <= 0.0) return points_.front();
  if (t >= duration()) return points_.back();
  const std::size_t i = segment_at(t);
  const double span = vertex_times_[i + 1] - vertex_times_[i];
  if (span <= 0.0) return points_[i + 1];
  const double u = (t - vertex_times_[i]) / span;
  return points_[i] + (points_[i + 1] - points_[i]) * u;
}

Vec3 Trajectory::velocity(double t) const {
  if (points_.size() == 1 || t < 0.0 || t >= duration()) return {};
  const std::size_t i = segment_at(t);
  const Vec3 d = points_[i + 1] - points_[i];
  const double len = norm(d);
  if (len == 0.0) return {};
  return d * (speed_ / len);
}

std::size_t Trajectory::vertices_reached(double t) const {
  return static_cast<std::size_t>(
      std::upper_bound(vertex_times_.begin(), vertex_times_.end(), t) -
      vertex_times_.begin());
}

Trajectory plan_trajectory(std::span<const Vec3> points, double v_plan) {
  if (points.empty()) {
    throw Error(ErrorCode::kEmptyPath, "cannot plan an empty path");
  }
  return Trajectory(std::vector<Vec3>(points.begin(), points.end()), v_plan);
}

Trajectory plan_trajectory(const FlightPath& path, double v_plan) {
  const auto pts = path.positions();
  return plan_trajectory(std::span<const Vec3>(pts), v_plan);
}

// --- Tracker --------------------------------------------------------------

DroneState tracker_step(const DroneState& state, const TrackerParams& params,
                        const Vec3& reference_pos, const Vec3& reference_vel,
                        const Vec3& disturbance, double dt) {
  if (!(dt > 0.0) || dt > kMaxTimestep) {
    throw Error(ErrorCode::kInvalidTimestep, "dt must lie in (0, 0.05] s");
  }
  const Vec3 e = reference_pos - state.position;
  const Vec3 de = reference_vel - state.velocity;
  Vec3 accel{saturate(params.kp * e.x + params.kd * de.x, params.accel_max),
             saturate(params.kp * e.y + params.kd * de.y, params.accel_max),
             saturate(params.kp * e.z + params.kd * de.z, params.accel_max)};
  Vec3 w = disturbance;
  const double wn = norm(w);
  if (wn > params.disturb_max) {
    w = wn > 0.0 ? w * (params.disturb_max / wn) : Vec3{};
  }
  accel += w;

  DroneState next = state;
  next.velocity += accel * dt;
  next.position += next.velocity * dt;
  return next;
}

// --- Disturbance ----------------------------------------------------------

DisturbanceProcess::DisturbanceProcess(double magnitude, std::uint64_t seed,
                                       bool full_magnitude, double min_hold,
                                       double max_hold)
    : rng_(seed),
      magnitude_(magnitude),
      full_magnitude_(full_magnitude),
      min_hold_(min_hold),
      max_hold_(max_hold) {}

Vec3 DisturbanceProcess::sample(double dt) {
  if (magnitude_ <= 0.0) return {};
  if (remaining_ <= 0.0) {
    const double m = full_magnitude_ ? magnitude_ : magnitude_ * rng_.uniform();
    current_ = rng_.unit_vector() * m;
    remaining_ = rng_.uniform(min_hold_, max_hold_);
  }
  remaining_ -= dt;
  return current_;
}

// --- Tracking error bound sweep ---------------------------------------------

double compute_teb(const TrackerParams& params, double v_plan,
                   const TebSweep& sweep) {
  params.validate();
  if (!(v_plan > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "planner speed must be > 0");
  }
  Rng rng(sweep.seed);
  double worst = 0.0;
  for (std::size_t episode = 0; episode < sweep.episodes; ++episode) {
    std::vector<Vec3> points{{0.0, 0.0, 0.0}};
    for (int s = 0; s <= sweep.corners; ++s) {
      const double len = rng.uniform(sweep.min_segment, sweep.max_segment);
      points.push_back(points.back() + rng.unit_vector() * len);
    }
    const Trajectory ref(std::move(points), v_plan);
    DisturbanceProcess disturbance(params.disturb_max, rng.next(), true);

    // Simulated in error coordinates (state minus reference) so rounding in
    // the reference cannot masquerade as tracking error.
    DroneState err;
    const double horizon =
        sweep.stop_at_end ? ref.duration() + sweep.settle_time : ref.duration();
    const auto steps = static_cast<std::size_t>(std::ceil(horizon / sweep.dt));
    for (std::size_t k = 0; k < steps; ++k) {
      const double t = static_cast<double>(k) * sweep.dt;
      const double t_next = static_cast<double>(k + 1) * sweep.dt;
      if (!sweep.stop_at_end && t_next > ref.duration()) break;
      err = tracker_step(err, params, {}, {}, disturbance.sample(sweep.dt), sweep.dt);
      const Vec3 v0 = ref.velocity(t);
      const Vec3 v1 = ref.velocity(t_next);
      if (v1 != v0) {
        // The reference turned or stopped during the step.
        err.position -= ref.position(t_next) - ref.position(t) - v0 * sweep.dt;
        err.velocity -= v1 - v0;
      }
      worst = std::max(worst, norm(err.position));
    }
  }
  return worst * sweep.safety_factor;
}

// --- Manual control ---------------------------------------------------------

JoystickInput JoystickInput::clamped() const {
  auto c = [](double v) { return std::isnan(v) ? 0.0 : std::clamp(v, -1.0, 1.0); };
  return {c(dx), c(dy), c(dz)};
}

double deflection_offset(double deflection) {
  const double d = std::clamp(deflection, -1.0, 1.0);
  const double mag = std::abs(d);
  if (!(mag > kDeadZone)) return 0.0;
  const double offset = (mag - kDeadZone) / (1.0 - kDeadZone) * kFullDeflectionOffset;
  return d < 0.0 ? -offset : offset;
}

Vec3 manual_setpoint(const DroneState& state, const JoystickInput& input,
                     const Box& bounds) {
  if (state.mode != FlightMode::kFlying) {
    throw Error(ErrorCode::kNotFlying, "joystick control needs a flying vehicle");
  }
  const JoystickInput in = input.clamped();
  const Vec3 offset{deflection_offset(in.dx), deflection_offset(in.dy),
                    deflection_offset(in.dz)};
  if (offset == Vec3{}) return state.setpoint;
  return bounds.clamp(state.position + offset);
}

// --- Vehicle ------------------------------------------------------------------

Vehicle::Vehicle(VehicleConfig config, const Vec3& pad)
    : config_(std::move(config)),
      state_(DroneState::grounded_at(pad, config_.airframe)) {
  config_.tracker.validate();
  if (!(config_.dt > 0.0) || config_.dt > kMaxTimestep) {
    throw Error(ErrorCode::kInvalidTimestep, "dt must lie in (0, 0.05] s");
  }
  if (!(config_.v_climb > 0.0) || !(config_.hover_altitude > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "climb speed and hover altitude must be positive");
  }
}

void Vehicle::takeoff() {
  if (state_.mode != FlightMode::kGrounded || motors_cut_) {
    throw Error(ErrorCode::kInvalidModeTransition,
                std::string("cannot take off while ") +
                    std::string(to_string(state_.mode)));
  }
  state_.mode = FlightMode::kTakingOff;
  takeoff_altitude_ = state_.position.z + config_.hover_altitude;
  trajectory_.reset();
}

void Vehicle::land() {
  if (state_.mode != FlightMode::kFlying || motors_cut_) {
    throw Error(ErrorCode::kInvalidModeTransition,
                std::string("cannot land while ") +
                    std::string(to_string(state_.mode)));
  }
  state_.mode = FlightMode::kLanding;
  trajectory_.reset();
}

void Vehicle::follow(Trajectory trajectory) {
  if (state_.mode != FlightMode::kFlying) {
    throw Error(ErrorCode::kNotFlying, "vehicle must be flying to follow a path");
  }
  trajectory_ = std::move(trajectory);
  trajectory_time_ = 0.0;
  vertices_reached_ = trajectory_->vertices_reached(0.0);
  state_.setpoint = trajectory_->position(0.0);
}

void Vehicle::hold(const Vec3& setpoint) {
  if (state_.mode != FlightMode::kFlying) {
    throw Error(ErrorCode::kNotFlying, "vehicle must be flying to hold a setpoint");
  }
  trajectory_.reset();
  state_.setpoint = setpoint;
}

void Vehicle::cut_motors() {
  motors_cut_ = true;
  trajectory_.reset();
}

void Vehicle::step(const Vec3& disturbance) {
  const double dt = config_.dt;
  if (motors_cut_) {
    if (state_.position.z <= 0.0 && state_.velocity == Vec3{}) return;
    state_.velocity.z -= config_.gravity * dt;
    state_.position += state_.velocity * dt;
    if (state_.position.z <= 0.0) {
      state_.position.z = 0.0;
      state_.velocity = {};
    }
    return;
  }

  switch (state_.mode) {
    case FlightMode::kGrounded:
      return;
    case FlightMode::kTakingOff: {
      const double z =
          std::min(takeoff_altitude_, state_.position.z + config_.v_climb * dt);
      state_.position.z = z;
      state_.velocity = {0.0, 0.0, config_.v_climb};
      if (takeoff_altitude_ - z <= kArrivalTolerance) {
        state_.position.z = takeoff_altitude_;
        state_.velocity = {};
        state_.mode = FlightMode::kFlying;
      }
      state_.setpoint = state_.position;
      return;
    }
    case FlightMode::kLanding: {
      const double z = std::max(0.0, state_.position.z - config_.v_climb * dt);
      state_.position.z = z;
      state_.velocity = {0.0, 0.0, -config_.v_climb};
      if (z <= kArrivalTolerance) {
        state_.position.z = 0.0;
        state_.velocity = {};
        state_.mode = FlightMode::kGrounded;
      }
      state_.setpoint = state_.position;
      return;
    }
    case FlightMode::kFlying:
      break;
  }

  Vec3 ref_pos = state_.setpoint;
  Vec3 ref_vel{};
  if (trajectory_) {
    ref_pos = trajectory_->position(trajectory_time_);
    ref_vel = trajectory_->velocity(trajectory_time_);
  }
  state_ = tracker_step(state_, config_.tracker, ref_pos, ref_vel, disturbance, dt);
  if (state_.position.z < 0.0) {
    state_.position.z = 0.0;
    state_.velocity.z = std::max(state_.velocity.z, 0.0);
  }
  if (trajectory_) {
    trajectory_time_ += dt;
    state_.setpoint = trajectory_->position(trajectory_time_);
    vertices_reached_ = trajectory_->vertices_reached(trajectory_time_);
    if (trajectory_time_ >= trajectory_->duration()) {
      vertices_reached_ = trajectory_->points().size();
      state_.setpoint = trajectory_->points().back();
      trajectory_.reset();
    }
  }
}

}  // namespace aeroplan
