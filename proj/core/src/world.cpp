#include "aeroplan/world.hpp"

#include <algorithm>
#include <utility>

#include "aeroplan/error.hpp"

namespace aeroplan {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

LabEnvironment validated(LabEnvironment env) {
  env.validate();
  return env;
}

double disturbance_magnitude(const SimConfig& sim) {
  return sim.disturbance ? sim.vehicle.tracker.disturb_max : 0.0;
}

bool has_effect(const JoystickInput& input) {
  return deflection_offset(input.dx) != 0.0 || deflection_offset(input.dy) != 0.0 ||
         deflection_offset(input.dz) != 0.0;
}

}  // namespace

World::World(LabEnvironment env, std::uint64_t seed)
    : env_(validated(std::move(env))),
      path_(env_.bounds),
      vehicle_(env_.sim.vehicle, env_.start),
      disturbance_(disturbance_magnitude(env_.sim), seed) {}

const TrialSpec* World::trial_spec() const {
  return trial_ ? &trial_->spec : nullptr;
}

const TrialLog* World::trial_log() const { return trial_ ? &trial_->log : nullptr; }

bool World::trial_ended() const { return trial_ && trial_->log.ended(); }

std::uint64_t World::trial_tick() const {
  return trial_ ? tick_ - trial_->start_tick : 0;
}

double World::trial_time() const {
  return static_cast<double>(trial_tick()) * sim().vehicle.dt;
}

TrialStatus World::trial_status() const {
  TrialStatus s;
  if (!trial_) return s;
  s.active = !trial_->log.ended();
  if (const auto* end = trial_->log.end()) {
    s.outcome = end->outcome;
    s.reason = end->reason;
  }
  s.progress = trial_->progress;
  s.required = trial_->spec.sequence.size();
  s.elapsed = trial_->log.end_time().value_or(trial_time());
  return s;
}

void World::log(double t, EventData data) {
  if (!trial_ || trial_->log.ended()) return;
  trial_->log.append(t, std::move(data));
}

std::uint64_t World::apply(const Command& command) {
  log(trial_time(), CommandEvent{trial_tick(), command});
  std::visit(
      Overloaded{
          [this](const AddWaypointCmd& c) {
            path_.add_waypoint(c.pos, Placement{c.after});
            after_path_edit();
          },
          [this](const AddWaypointIndirectCmd& c) {
            path_.add_waypoint_indirect(c.pick_ray.to_ray(), c.tilt_ray.to_ray());
            after_path_edit();
          },
          [this](const MoveWaypointCmd& c) {
            path_.move_waypoint(c.id, c.pos);
            after_path_edit();
          },
          [this](const DeleteWaypointCmd& c) {
            path_.delete_waypoint(c.id);
            after_path_edit();
          },
          [this](const TakeoffCmd&) {
            vehicle_.takeoff();
            manual_ = false;
            route_ids_.clear();
            visited_.clear();
            log(trial_time(), TakeoffEvent{});
          },
          [this](const LandCmd&) {
            vehicle_.land();
            route_ids_.clear();
            log(trial_time(), LandEvent{});
          },
          [this](const JoystickCmd& c) {
            if (vehicle_.motors_cut()) {
              throw Error(ErrorCode::kNotFlying, "vehicle has lost thrust");
            }
            const JoystickInput input = JoystickInput{c.dx, c.dy, c.dz}.clamped();
            const Vec3 sp = manual_setpoint(drone(), input, env_.bounds);
            if (!has_effect(input)) return;
            update_visited();
            manual_ = true;
            route_ids_.clear();
            vehicle_.hold(sp);
          },
      },
      command);
  return path_.revision();
}

void World::after_path_edit() {
  log(trial_time(), PathEditEvent{path_.revision()});
  if (drone().mode == FlightMode::kFlying && !manual_ && !vehicle_.motors_cut()) {
    engage_autopilot();
  }
}

void World::update_visited() {
  if (route_ids_.empty()) return;
  const std::size_t reached = vehicle_.vertices_reached();
  // Vertex 0 is the reference the trajectory started from.
  const std::size_t n = std::min(reached > 0 ? reached - 1 : 0, route_ids_.size());
  visited_.insert(route_ids_.begin(),
                  route_ids_.begin() + static_cast<std::ptrdiff_t>(n));
}

void World::engage_autopilot() {
  update_visited();
  const auto wps = path_.waypoints();
  std::size_t first = 0;
  for (std::size_t i = 0; i < wps.size(); ++i) {
    if (visited_.count(wps[i].id)) first = i + 1;
  }
  route_ids_.clear();
  if (first >= wps.size()) {
    if (vehicle_.following()) vehicle_.hold(drone().setpoint);
    return;
  }
  std::vector<Vec3> points{drone().setpoint};
  for (std::size_t i = first; i < wps.size(); ++i) {
    points.push_back(wps[i].position);
    route_ids_.push_back(wps[i].id);
  }
  vehicle_.follow(Trajectory(std::move(points), sim().vehicle.v_plan));
}

void World::step() {
  const Vec3 previous = drone().position;
  const FlightMode before = drone().mode;
  // Drawn every tick so the stream does not depend on the flight mode.
  const Vec3 w = disturbance_.sample(sim().vehicle.dt);
  vehicle_.step(w);
  ++tick_;
  if (before == FlightMode::kTakingOff && drone().mode == FlightMode::kFlying &&
      !manual_) {
    engage_autopilot();
  }
  update_visited();
  run_detectors(previous);
}

void World::run_detectors(const Vec3& previous_position) {
  const auto now =
      detect_collisions(drone(), env_, sim().vehicle.ground_contact_height);
  std::vector<Collision> fresh;
  for (const auto& c : now) {
    if (std::find(contacts_.begin(), contacts_.end(), c) == contacts_.end()) {
      fresh.push_back(c);
    }
  }
  contacts_ = now;

  const double t = trial_time();
  for (const auto& c : fresh) {
    log(t, CollisionEvent{c});
    switch (c.kind) {
      case CollisionKind::kRotorHoop:
        vehicle_.cut_motors();
        knock_at_.reset();
        last_hoop_contact_ = t;
        ground_after_contact_ = false;
        break;
      case CollisionKind::kBodyHoop:
        if (!vehicle_.motors_cut() && !knock_at_) {
          knock_at_ = time() + sim().knock_delay;
        }
        last_hoop_contact_ = t;
        ground_after_contact_ = false;
        break;
      case CollisionKind::kGround:
        if (last_hoop_contact_) ground_after_contact_ = true;
        break;
    }
  }
  if (knock_at_ && time() >= *knock_at_ - 1e-9) {
    vehicle_.cut_motors();
    knock_at_.reset();
  }

  if (!trial_ || trial_->log.ended()) return;
  Trial& trial = *trial_;

  if (!fresh.empty()) {
    if (auto crash = classify_crash(trial.log, sim().ground_window)) {
      log(t, CrashEvent{crash->definition});
      end_trial(Outcome::kFailure, "crash");
      return;
    }
  }

  if (!vehicle_.motors_cut()) {
    for (const auto& hoop : env_.hoops) {
      const auto dir = detect_traversal(previous_position, drone().position, hoop,
                                        drone().body_radius);
      if (!dir) continue;
      log(t, TraversalEvent{hoop.label, *dir});
      if (trial.progress < trial.spec.sequence.size() &&
          trial.spec.sequence[trial.progress] == hoop.label) {
        ++trial.progress;
      }
    }
    if (trial.progress == trial.spec.sequence.size()) trial.success_pending = true;
  }

  const bool window_open = last_hoop_contact_ && !ground_after_contact_ &&
                           t - *last_hoop_contact_ <= sim().ground_window;
  if (trial.success_pending && !window_open) {
    end_trial(Outcome::kSuccess, "sequence complete");
    return;
  }
  if (t >= sim().timeout) end_trial(Outcome::kFailure, "timeout");
}

void World::end_trial(Outcome outcome, std::string reason) {
  log(trial_time(), TrialEndEvent{outcome, std::move(reason)});
}

void World::start_trial(const TrialSpec& spec, std::uint64_t seed,
                        std::string agent,
                        std::optional<WaypointId> first_waypoint_id,
                        std::optional<std::uint64_t> base_revision_override) {
  if (!(drone().mode == FlightMode::kGrounded || vehicle_.motors_cut())) {
    throw Error(ErrorCode::kInvalidModeTransition,
                "trials start with the vehicle on the ground");
  }
  if (spec.sequence.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "trial sequence is empty");
  }
  for (const auto& label : spec.sequence) {
    if (!env_.find(label)) {
      throw Error(ErrorCode::kInvalidArgument, "unknown hoop " + label);
    }
  }
  const WaypointId first = first_waypoint_id.value_or(path_.next_id());
  const std::uint64_t base_revision =
      base_revision_override.value_or(path_.revision() + 1);
  FlightPath fresh_path(env_.bounds, path_.policy(), first, base_revision);

  path_ = std::move(fresh_path);
  vehicle_ = Vehicle(env_.sim.vehicle, env_.start);
  disturbance_ = DisturbanceProcess(disturbance_magnitude(env_.sim), seed);
  manual_ = false;
  route_ids_.clear();
  visited_.clear();
  contacts_.clear();
  knock_at_.reset();
  last_hoop_contact_.reset();
  ground_after_contact_ = false;

  trial_ = Trial{spec, tick_, {}, 0, false};
  trial_->log.append(0.0, TrialStartEvent{seed, spec, std::move(agent), first,
                                          base_revision, env_});
}

}  // namespace aeroplan
