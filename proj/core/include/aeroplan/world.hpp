#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "aeroplan/commands.hpp"
#include "aeroplan/detection.hpp"
#include "aeroplan/environment.hpp"
#include "aeroplan/flightpath.hpp"
#include "aeroplan/trial_log.hpp"
#include "aeroplan/vehicle.hpp"

namespace aeroplan {

struct TrialStatus {
  bool active = false;  // a trial was started and has not ended
  std::optional<Outcome> outcome;
  std::string reason;
  std::size_t progress = 0;  // required traversals completed
  std::size_t required = 0;
  double elapsed = 0.0;
};

// The authoritative simulation: one flight path, one vehicle, the lab, and
// (optionally) a running trial. Commands are applied between ticks; every
// tick advances the vehicle by the configured dt and runs the detectors.
//
// After takeoff the vehicle flies the path autonomously, re-planning from its
// current reference whenever the path changes. A non-zero joystick input
// switches to assisted manual control until the next takeoff.
class World {
 public:
  explicit World(LabEnvironment env, std::uint64_t seed = 0);

  const LabEnvironment& env() const { return env_; }
  const SimConfig& sim() const { return env_.sim; }
  const FlightPath& path() const { return path_; }
  const Vehicle& vehicle() const { return vehicle_; }
  const DroneState& drone() const { return vehicle_.state(); }
  std::uint64_t tick() const { return tick_; }
  double time() const { return static_cast<double>(tick_) * sim().vehicle.dt; }
  bool manual() const { return manual_; }

  // Applies a command at the current tick and returns the path revision.
  // Throws aeroplan::Error when rejected; the world is then unchanged. While
  // a trial runs, the command is logged whether or not it was accepted.
  std::uint64_t apply(const Command& command);

  void step();

  // Resets the path and puts the vehicle back on the start pad. Requires a
  // grounded (or crashed) vehicle; throws kInvalidModeTransition otherwise.
  // first_waypoint_id defaults to continuing the current id sequence and
  // base_revision to one past the current revision.
  void start_trial(const TrialSpec& spec, std::uint64_t seed, std::string agent,
                   std::optional<WaypointId> first_waypoint_id = std::nullopt,
                   std::optional<std::uint64_t> base_revision = std::nullopt);

  const TrialSpec* trial_spec() const;
  const TrialLog* trial_log() const;
  TrialStatus trial_status() const;
  bool trial_ended() const;
  double trial_time() const;
  std::uint64_t trial_tick() const;

 private:
  void log(double t, EventData data);
  void after_path_edit();
  void engage_autopilot();
  void update_visited();
  void run_detectors(const Vec3& previous_position);
  void end_trial(Outcome outcome, std::string reason);

  LabEnvironment env_;
  FlightPath path_;
  Vehicle vehicle_;
  DisturbanceProcess disturbance_;
  std::uint64_t tick_ = 0;

  bool manual_ = false;
  std::vector<WaypointId> route_ids_;  // waypoints of the trajectory in flight
  std::set<WaypointId> visited_;

  std::vector<Collision> contacts_;  // contacts present after the last tick
  std::optional<double> knock_at_;   // pending loss of control
  std::optional<double> last_hoop_contact_;
  bool ground_after_contact_ = false;

  struct Trial {
    TrialSpec spec;
    std::uint64_t start_tick = 0;
    TrialLog log;
    std::size_t progress = 0;
    bool success_pending = false;
  };
  std::optional<Trial> trial_;
};

}  // namespace aeroplan
