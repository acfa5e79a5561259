#pragma once

// Headless trials: a scripted agent drives a World until the trial ends.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aeroplan/commands.hpp"
#include "aeroplan/environment.hpp"
#include "aeroplan/random.hpp"
#include "aeroplan/trial_log.hpp"
#include "aeroplan/world.hpp"

namespace aeroplan {

// Called once before every tick; the returned commands are applied in order.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::string_view name() const = 0;
  virtual std::vector<Command> act(const World& world) = 0;
};

// Waypoints that carry the vehicle through each hoop of the sequence in order:
// one approach point in front of the hoop and one behind it, plus via points
// where a straight leg would come too close to a hoop's tube.
std::vector<Vec3> plan_hoop_route(const LabEnvironment& env, const TrialSpec& spec,
                                  const Vec3& from, double approach = 0.5);

// Smallest clearance between the body sphere travelling a straight leg and
// any hoop tube.
double leg_clearance(const LabEnvironment& env, const Vec3& a, const Vec3& b,
                     double body_radius);

// Operator placing waypoints with the direct tool, then launching.
class DirectPlannerAgent : public Agent {
 public:
  explicit DirectPlannerAgent(std::uint64_t place_interval_ticks = 100);
  std::string_view name() const override { return "oracle"; }
  std::vector<Command> act(const World& world) override;

 private:
  std::uint64_t interval_;
  std::optional<std::vector<Vec3>> route_;
  std::size_t placed_ = 0;
  bool launched_ = false;
};

// Same plan entered with the ray-cast pick and tilt tool.
class IndirectPlannerAgent : public Agent {
 public:
  explicit IndirectPlannerAgent(std::uint64_t place_interval_ticks = 100,
                                Vec3 eye = {1.524, -0.6, 1.6});
  std::string_view name() const override { return "indirect"; }
  std::vector<Command> act(const World& world) override;

 private:
  std::uint64_t interval_;
  Vec3 eye_;
  std::optional<std::vector<Vec3>> route_;
  std::size_t placed_ = 0;
  bool launched_ = false;
};

// Joystick pilot steering towards the same route points.
class ManualPilotAgent : public Agent {
 public:
  explicit ManualPilotAgent(std::uint64_t input_interval_ticks = 5,
                            double max_offset = 0.4, double jitter = 0.03);
  std::string_view name() const override { return "manual"; }
  std::vector<Command> act(const World& world) override;

 private:
  std::uint64_t interval_;
  double max_offset_;
  double jitter_;
  std::optional<Rng> rng_;
  std::optional<std::vector<Vec3>> route_;
  std::size_t target_ = 0;
  bool launched_ = false;
};

// Never launches.
class IdleAgent : public Agent {
 public:
  std::string_view name() const override { return "idle"; }
  std::vector<Command> act(const World&) override { return {}; }
};

// Flies a rotor hub straight through the rim of the first hoop in the sequence.
class RimStrikeAgent : public Agent {
 public:
  std::string_view name() const override { return "rim"; }
  std::vector<Command> act(const World& world) override;

 private:
  bool done_ = false;
};

// Re-issues logged commands at their logged ticks.
class ReplayAgent : public Agent {
 public:
  explicit ReplayAgent(const TrialLog& log);
  std::string_view name() const override { return name_; }
  std::vector<Command> act(const World& world) override;

 private:
  std::string name_;
  std::multimap<std::uint64_t, Command> commands_;
};

// Throws kInvalidArgument for an unknown name.
std::unique_ptr<Agent> make_agent(std::string_view name);
std::vector<std::string> agent_names();

struct TrialResult {
  TrialLog log;
  Outcome outcome = Outcome::kFailure;
  std::string reason;
  double duration = 0.0;       // s
  double planning_time = 0.0;  // s
  int crashes = 0;
  std::optional<int> crash_definition;
  std::size_t commands = 0;
  std::size_t rejected = 0;
};

TrialResult run_trial(const LabEnvironment& env, const TrialSpec& spec,
                      Agent& agent, std::uint64_t seed);

// Re-runs a logged trial from its trial_start record and commands. Throws
// kIncompleteLog when the start record is missing.
TrialResult replay_trial(const TrialLog& log);

// Derives the summary fields from a finished log. Throws kIncompleteLog.
TrialResult summarize(TrialLog log);

// Trial duration minus the airborne intervals [takeoff, land).
double planning_time(const TrialLog& log);

// Writes trial-NNN.jsonl per result, summary.csv (one row per trial) and
// measures.csv (long format: subject,condition,measure,value) into dir.
void write_trial_outputs(const std::filesystem::path& dir,
                         const std::vector<TrialResult>& results,
                         std::string_view subject);

}  // namespace aeroplan
