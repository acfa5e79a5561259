#include "aeroplan/trial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>

#include "aeroplan/detection.hpp"
#include "aeroplan/error.hpp"

namespace aeroplan {

namespace {

constexpr double kLegMargin = 0.08;  // m of clear air kept around each tube
constexpr double kLegSampleStep = 0.01;
constexpr int kMaxDetourDepth = 4;

const Hoop& require_hoop(const LabEnvironment& env, const std::string& label) {
  const Hoop* h = env.find(label);
  if (!h) throw Error(ErrorCode::kInvalidArgument, "unknown hoop " + label);
  return *h;
}

Vec3 hover_point(const LabEnvironment& env) {
  return env.start + Vec3{0.0, 0.0, env.sim.vehicle.hover_altitude};
}

double leg_min(const LabEnvironment& env, const Vec3& a, const Vec3& b,
               double body_radius, const Hoop** worst, Vec3* worst_point) {
  const double len = distance(a, b);
  const int n = std::max(1, static_cast<int>(std::ceil(len / kLegSampleStep)));
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    const Vec3 p = a + (b - a) * (static_cast<double>(i) / n);
    for (const auto& h : env.hoops) {
      const double c = distance_to_core_circle(p, h) - h.tube_radius - body_radius;
      if (c < best) {
        best = c;
        if (worst) *worst = &h;
        if (worst_point) *worst_point = p;
      }
    }
  }
  return best;
}

void add_leg(const LabEnvironment& env, const Vec3& a, const Vec3& b,
             double body_radius, int depth, std::vector<Vec3>& out) {
  const Hoop* hoop = nullptr;
  Vec3 p;
  const double clearance = leg_min(env, a, b, body_radius, &hoop, &p);
  if (clearance >= kLegMargin || depth >= kMaxDetourDepth || !hoop) {
    out.push_back(b);
    return;
  }
  const Vec3 n = normalized(hoop->normal);
  const double reach = hoop->core_radius() + hoop->tube_radius + body_radius +
                       kLegMargin + 0.05;
  const double axial = dot(p - hoop->center, n);
  const std::array<Vec3, 4> candidates{
      Vec3{p.x, p.y, hoop->center.z + reach},
      Vec3{p.x, p.y, hoop->center.z - reach},
      p + n * (reach - axial),
      p - n * (reach + axial),
  };
  const Vec3* best = nullptr;
  double best_score = -std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) {
    const Vec3 v = env.bounds.clamp(c);
    if (v.z < hover_point(env).z * 0.5) continue;
    const double score = std::min(leg_min(env, a, v, body_radius, nullptr, nullptr),
                                  leg_min(env, v, b, body_radius, nullptr, nullptr)) -
                         1e-3 * (distance(a, v) + distance(v, b));
    if (score > best_score) {
      best_score = score;
      best = &c;
    }
  }
  if (!best) {
    out.push_back(b);
    return;
  }
  const Vec3 via = env.bounds.clamp(*best);
  add_leg(env, a, via, body_radius, depth + 1, out);
  add_leg(env, via, b, body_radius, depth + 1, out);
}

std::uint64_t trial_seed(const World& world) {
  const auto* log = world.trial_log();
  const auto* start = log ? log->start() : nullptr;
  return start ? start->seed : 0;
}

double deflection_for(double offset) {
  if (offset == 0.0) return 0.0;
  const double d = kDeadZone + (1.0 - kDeadZone) *
                                   std::min(std::abs(offset) / kFullDeflectionOffset, 1.0);
  return std::copysign(d, offset);
}

}  // namespace

double leg_clearance(const LabEnvironment& env, const Vec3& a, const Vec3& b,
                     double body_radius) {
  return leg_min(env, a, b, body_radius, nullptr, nullptr);
}

std::vector<Vec3> plan_hoop_route(const LabEnvironment& env, const TrialSpec& spec,
                                  const Vec3& from, double approach) {
  const double body = env.sim.vehicle.airframe.body_radius;
  std::vector<Vec3> out;
  Vec3 prev = from;
  for (const auto& label : spec.sequence) {
    const Hoop& h = require_hoop(env, label);
    const Vec3 n = normalized(h.normal);
    const double side = dot(prev - h.center, n) >= 0.0 ? 1.0 : -1.0;
    const Vec3 entry = h.center + n * (side * approach);
    const Vec3 exit = h.center - n * (side * approach);
    add_leg(env, prev, entry, body, 0, out);
    out.push_back(exit);
    prev = exit;
  }
  return out;
}

// --- Agents --------------------------------------------------------------------

DirectPlannerAgent::DirectPlannerAgent(std::uint64_t place_interval_ticks)
    : interval_(std::max<std::uint64_t>(1, place_interval_ticks)) {}

std::vector<Command> DirectPlannerAgent::act(const World& world) {
  const TrialSpec* spec = world.trial_spec();
  if (!spec) return {};
  if (!route_) route_ = plan_hoop_route(world.env(), *spec, hover_point(world.env()));
  const std::uint64_t tick = world.trial_tick();
  if (placed_ < route_->size()) {
    if (tick < (placed_ + 1) * interval_) return {};
    return {AddWaypointCmd{(*route_)[placed_++], std::nullopt}};
  }
  if (!launched_ && tick >= (placed_ + 1) * interval_) {
    launched_ = true;
    return {TakeoffCmd{}};
  }
  return {};
}

IndirectPlannerAgent::IndirectPlannerAgent(std::uint64_t place_interval_ticks,
                                           Vec3 eye)
    : interval_(std::max<std::uint64_t>(1, place_interval_ticks)), eye_(eye) {}

std::vector<Command> IndirectPlannerAgent::act(const World& world) {
  const TrialSpec* spec = world.trial_spec();
  if (!spec) return {};
  if (!route_) route_ = plan_hoop_route(world.env(), *spec, hover_point(world.env()));
  const std::uint64_t tick = world.trial_tick();
  if (placed_ < route_->size()) {
    if (tick < (placed_ + 1) * interval_) return {};
    const Vec3 target = (*route_)[placed_++];
    const Vec3 floor{target.x, target.y, 0.0};
    return {AddWaypointIndirectCmd{{eye_, floor - eye_}, {eye_, target - eye_}}};
  }
  if (!launched_ && tick >= (placed_ + 1) * interval_) {
    launched_ = true;
    return {TakeoffCmd{}};
  }
  return {};
}

ManualPilotAgent::ManualPilotAgent(std::uint64_t input_interval_ticks,
                                   double max_offset, double jitter)
    : interval_(std::max<std::uint64_t>(1, input_interval_ticks)),
      max_offset_(max_offset),
      jitter_(jitter) {}

std::vector<Command> ManualPilotAgent::act(const World& world) {
  const TrialSpec* spec = world.trial_spec();
  if (!spec) return {};
  if (!route_) {
    route_ = plan_hoop_route(world.env(), *spec, hover_point(world.env()));
    rng_.emplace(trial_seed(world) ^ 0x6a6f79737469636bULL);
  }
  if (world.trial_tick() % interval_ != 0) return {};
  if (!launched_) {
    launched_ = true;
    return {TakeoffCmd{}};
  }
  const DroneState& s = world.drone();
  if (s.mode != FlightMode::kFlying || world.vehicle().motors_cut()) return {};
  if (target_ < route_->size() && distance((*route_)[target_], s.position) < 0.06) {
    ++target_;
  }
  if (target_ >= route_->size()) return {};
  Vec3 offset = (*route_)[target_] - s.position;
  const double len = norm(offset);
  if (len > max_offset_) offset = offset * (max_offset_ / len);
  offset += Vec3{rng_->uniform(-jitter_, jitter_), rng_->uniform(-jitter_, jitter_),
                 rng_->uniform(-jitter_, jitter_)};
  return {JoystickCmd{deflection_for(offset.x), deflection_for(offset.y),
                      deflection_for(offset.z)}};
}

std::vector<Command> RimStrikeAgent::act(const World& world) {
  const TrialSpec* spec = world.trial_spec();
  if (done_ || !spec) return {};
  done_ = true;
  const LabEnvironment& env = world.env();
  const Hoop& h = require_hoop(env, spec->sequence.front());
  const Vec3 n = normalized(h.normal);
  const double side = dot(hover_point(env) - h.center, n) >= 0.0 ? 1.0 : -1.0;
  const Vec3 travel = n * -side;

  // The hub that leads along the direction of travel meets the tube first.
  const auto& rotors = world.drone().rotor_offsets;
  const Vec3 hub = *std::max_element(
      rotors.begin(), rotors.end(),
      [&](const Vec3& a, const Vec3& b) { return dot(a, travel) < dot(b, travel); });
  const Vec3 hub_in_plane = hub - n * dot(hub, n);
  const Vec3 lateral = normalized(cross(n, Vec3{0.0, 0.0, 1.0}));
  const Vec3 aim = h.center + lateral * h.core_radius() - hub_in_plane;

  return {AddWaypointCmd{aim - travel * 1.2, std::nullopt},
          AddWaypointCmd{aim + travel * 0.6, std::nullopt}, TakeoffCmd{}};
}

ReplayAgent::ReplayAgent(const TrialLog& log) {
  const auto* start = log.start();
  if (!start) throw Error(ErrorCode::kIncompleteLog, "log has no trial_start record");
  name_ = start->agent;
  for (auto& c : log.commands()) commands_.emplace(c.tick, std::move(c.command));
}

std::vector<Command> ReplayAgent::act(const World& world) {
  std::vector<Command> out;
  auto [lo, hi] = commands_.equal_range(world.trial_tick());
  for (auto it = lo; it != hi; ++it) out.push_back(it->second);
  return out;
}

std::vector<std::string> agent_names() {
  return {"oracle", "indirect", "manual", "idle", "rim"};
}

std::unique_ptr<Agent> make_agent(std::string_view name) {
  if (name == "oracle") return std::make_unique<DirectPlannerAgent>();
  if (name == "indirect") return std::make_unique<IndirectPlannerAgent>();
  if (name == "manual") return std::make_unique<ManualPilotAgent>();
  if (name == "idle") return std::make_unique<IdleAgent>();
  if (name == "rim") return std::make_unique<RimStrikeAgent>();
  throw Error(ErrorCode::kInvalidArgument, "unknown agent " + std::string(name));
}

// --- Running ---------------------------------------------------------------------

namespace {

std::size_t drive(World& world, Agent& agent) {
  std::size_t rejected = 0;
  while (!world.trial_ended()) {
    for (const auto& c : agent.act(world)) {
      try {
        world.apply(c);
      } catch (const Error&) {
        ++rejected;
      }
    }
    world.step();
  }
  return rejected;
}

}  // namespace

TrialResult run_trial(const LabEnvironment& env, const TrialSpec& spec,
                      Agent& agent, std::uint64_t seed) {
  World world(env, seed);
  world.start_trial(spec, seed, std::string(agent.name()));
  const std::size_t rejected = drive(world, agent);
  TrialResult r = summarize(*world.trial_log());
  r.rejected = rejected;
  return r;
}

TrialResult replay_trial(const TrialLog& log) {
  const auto* start = log.start();
  if (!start) throw Error(ErrorCode::kIncompleteLog, "log has no trial_start record");
  World world(start->environment, start->seed);
  world.start_trial(start->spec, start->seed, start->agent, start->first_waypoint_id,
                    start->base_revision);
  ReplayAgent agent(log);
  const std::size_t rejected = drive(world, agent);
  TrialResult r = summarize(*world.trial_log());
  r.rejected = rejected;
  return r;
}

double planning_time(const TrialLog& log) {
  const auto end = log.end_time();
  if (!end) throw Error(ErrorCode::kIncompleteLog, "trial has not ended");
  double airborne = 0.0;
  double up_at = 0.0;
  bool up = false;
  for (const auto& e : log.events()) {
    if (std::holds_alternative<TakeoffEvent>(e.data)) {
      if (!up) up_at = e.t;
      up = true;
    } else if (std::holds_alternative<LandEvent>(e.data)) {
      if (up) airborne += e.t - up_at;
      up = false;
    }
  }
  if (up) airborne += *end - up_at;
  return *end - airborne;
}

TrialResult summarize(TrialLog log) {
  const auto* end = log.end();
  if (!end || !log.start()) {
    throw Error(ErrorCode::kIncompleteLog, "log lacks a trial_start or trial_end");
  }
  TrialResult r;
  r.outcome = end->outcome;
  r.reason = end->reason;
  r.duration = *log.end_time();
  r.planning_time = planning_time(log);
  for (const auto& e : log.events()) {
    if (const auto* c = std::get_if<CrashEvent>(&e.data)) {
      ++r.crashes;
      if (!r.crash_definition) r.crash_definition = c->definition;
    }
    if (std::holds_alternative<CommandEvent>(e.data)) ++r.commands;
  }
  r.log = std::move(log);
  return r;
}

void write_trial_outputs(const std::filesystem::path& dir,
                         const std::vector<TrialResult>& results,
                         std::string_view subject) {
  std::filesystem::create_directories(dir);
  std::ofstream summary(dir / "summary.csv", std::ios::binary);
  std::ofstream measures(dir / "measures.csv", std::ios::binary);
  if (!summary || !measures) {
    throw Error(ErrorCode::kConfigError, "cannot write into " + dir.string());
  }
  summary << "trial,subject,agent,seed,condition,sequence,outcome,reason,duration_s,"
             "planning_time_s,crashes,crash_definition,success,commands,rejected\n";
  measures << "subject,condition,measure,value\n";
  summary << std::setprecision(10);
  measures << std::setprecision(10);

  for (std::size_t i = 0; i < results.size(); ++i) {
    const TrialResult& r = results[i];
    const auto* start = r.log.start();
    if (!start) throw Error(ErrorCode::kIncompleteLog, "log has no trial_start record");
    char name[32];
    std::snprintf(name, sizeof name, "trial-%03zu.jsonl", i + 1);
    save_log(dir / name, r.log);

    std::string sequence;
    for (const auto& label : start->spec.sequence) {
      if (!sequence.empty()) sequence += '-';
      sequence += label;
    }
    const std::string condition(to_string(start->spec.interface_tag));
    const int success = r.outcome == Outcome::kSuccess ? 1 : 0;
    summary << i + 1 << ',' << subject << ',' << start->agent << ',' << start->seed
            << ',' << condition << ',' << sequence << ',' << to_string(r.outcome)
            << ',' << r.reason << ',' << r.duration << ',' << r.planning_time << ','
            << r.crashes << ','
            << (r.crash_definition ? std::to_string(*r.crash_definition) : "") << ','
            << success << ',' << r.commands << ',' << r.rejected << '\n';
    measures << subject << ',' << condition << ",planning_time," << r.planning_time
             << '\n';
    measures << subject << ',' << condition << ",crashes," << r.crashes << '\n';
    measures << subject << ',' << condition << ",success," << success << '\n';
  }
}

}  // namespace aeroplan
