#include "aeroplan/trial_log.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "aeroplan/error.hpp"

namespace aeroplan {

using nlohmann::json;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

std::string_view to_string(Outcome outcome) {
  return outcome == Outcome::kSuccess ? "success" : "failure";
}

std::string_view event_kind(const EventData& data) {
  return std::visit(
      Overloaded{
          [](const TrialStartEvent&) { return std::string_view("trial_start"); },
          [](const CommandEvent&) { return std::string_view("command"); },
          [](const PathEditEvent&) { return std::string_view("path_edit"); },
          [](const TakeoffEvent&) { return std::string_view("takeoff"); },
          [](const LandEvent&) { return std::string_view("land"); },
          [](const TraversalEvent&) { return std::string_view("traversal"); },
          [](const CollisionEvent&) { return std::string_view("collision"); },
          [](const CrashEvent&) { return std::string_view("crash_declared"); },
          [](const TrialEndEvent&) { return std::string_view("trial_end"); },
      },
      data);
}

void TrialLog::append(double t, EventData data) {
  if (ended()) {
    throw Error(ErrorCode::kInvalidArgument, "trial log already ended");
  }
  if (!events_.empty() && t < events_.back().t) {
    throw Error(ErrorCode::kInvalidArgument, "trial log events must not go back in time");
  }
  const bool is_end = std::holds_alternative<TrialEndEvent>(data);
  events_.push_back({t, std::move(data)});
  if (is_end) end_index_ = events_.size() - 1;
}

const TrialEndEvent* TrialLog::end() const {
  if (!end_index_) return nullptr;
  return &std::get<TrialEndEvent>(events_[*end_index_].data);
}

std::optional<double> TrialLog::end_time() const {
  if (!end_index_) return std::nullopt;
  return events_[*end_index_].t;
}

const TrialStartEvent* TrialLog::start() const {
  for (const auto& e : events_) {
    if (auto* s = std::get_if<TrialStartEvent>(&e.data)) return s;
  }
  return nullptr;
}

std::vector<CommandEvent> TrialLog::commands() const {
  std::vector<CommandEvent> out;
  for (const auto& e : events_) {
    if (auto* c = std::get_if<CommandEvent>(&e.data)) out.push_back(*c);
  }
  return out;
}

std::vector<std::string> TrialLog::traversals() const {
  std::vector<std::string> out;
  for (const auto& e : events_) {
    if (auto* tr = std::get_if<TraversalEvent>(&e.data)) out.push_back(tr->hoop);
  }
  return out;
}

std::optional<CrashDeclared> classify_crash(const TrialLog& log,
                                            double ground_window) {
  std::optional<CrashDeclared> best;
  auto offer = [&best](double t, int definition) {
    if (!best || t < best->t || (t == best->t && definition < best->definition)) {
      best = CrashDeclared{t, definition};
    }
  };
  std::optional<double> last_hoop_contact;
  for (const auto& e : log.events()) {
    const auto* c = std::get_if<CollisionEvent>(&e.data);
    if (!c) continue;
    switch (c->collision.kind) {
      case CollisionKind::kRotorHoop:
        offer(e.t, 1);
        last_hoop_contact = e.t;
        break;
      case CollisionKind::kBodyHoop:
        last_hoop_contact = e.t;
        break;
      case CollisionKind::kGround:
        if (last_hoop_contact && e.t - *last_hoop_contact <= ground_window) {
          offer(e.t, 2);
        }
        break;
    }
  }
  return best;
}

std::size_t matched_prefix(std::span<const std::string> traversals,
                           std::span<const std::string> required) {
  std::size_t matched = 0;
  for (const auto& label : traversals) {
    if (matched < required.size() && label == required[matched]) ++matched;
  }
  return matched;
}

bool sequence_satisfied(std::span<const std::string> traversals,
                        std::span<const std::string> required) {
  return matched_prefix(traversals, required) == required.size();
}

// --- Serialization ------------------------------------------------------------

json event_to_json(const Event& event) {
  json payload = std::visit(
      Overloaded{
          [](const TrialStartEvent& s) {
            return json{{"seed", s.seed},
                        {"spec", s.spec},
                        {"agent", s.agent},
                        {"first_waypoint_id", s.first_waypoint_id},
                        {"base_revision", s.base_revision},
                        {"environment", environment_to_json(s.environment)}};
          },
          [](const CommandEvent& c) {
            return json{{"tick", c.tick},
                        {"type", std::string(command_type(c.command))},
                        {"command", command_payload(c.command)}};
          },
          [](const PathEditEvent& p) { return json{{"revision", p.revision}}; },
          [](const TakeoffEvent&) { return json::object(); },
          [](const LandEvent&) { return json::object(); },
          [](const TraversalEvent& tr) {
            return json{{"hoop", tr.hoop}, {"direction", tr.direction}};
          },
          [](const CollisionEvent& c) {
            json j{{"kind", std::string(to_string(c.collision.kind))}};
            if (!c.collision.hoop.empty()) j["hoop"] = c.collision.hoop;
            return j;
          },
          [](const CrashEvent& c) { return json{{"definition", c.definition}}; },
          [](const TrialEndEvent& e) {
            return json{{"outcome", std::string(to_string(e.outcome))},
                        {"reason", e.reason}};
          },
      },
      event.data);
  return json{{"t", event.t},
              {"kind", std::string(event_kind(event.data))},
              {"payload", std::move(payload)}};
}

Event event_from_json(const json& record) {
  try {
    Event e;
    e.t = record.at("t").get<double>();
    const auto kind = record.at("kind").get<std::string>();
    const json& p = record.at("payload");
    if (kind == "trial_start") {
      TrialStartEvent s;
      s.seed = p.at("seed").get<std::uint64_t>();
      s.spec = p.at("spec").get<TrialSpec>();
      s.agent = p.at("agent").get<std::string>();
      s.first_waypoint_id = p.at("first_waypoint_id").get<WaypointId>();
      s.base_revision = p.at("base_revision").get<std::uint64_t>();
      s.environment = environment_from_json(p.at("environment"));
      e.data = std::move(s);
    } else if (kind == "command") {
      e.data = CommandEvent{p.at("tick").get<std::uint64_t>(),
                            command_from_payload(p.at("type").get<std::string>(),
                                                 p.at("command"))};
    } else if (kind == "path_edit") {
      e.data = PathEditEvent{p.at("revision").get<std::uint64_t>()};
    } else if (kind == "takeoff") {
      e.data = TakeoffEvent{};
    } else if (kind == "land") {
      e.data = LandEvent{};
    } else if (kind == "traversal") {
      e.data = TraversalEvent{p.at("hoop").get<std::string>(),
                              p.at("direction").get<int>()};
    } else if (kind == "collision") {
      auto k = collision_kind_from_string(p.at("kind").get<std::string>());
      if (!k) throw Error(ErrorCode::kProtocolError, "unknown collision kind");
      e.data = CollisionEvent{{*k, p.value("hoop", std::string{})}};
    } else if (kind == "crash_declared") {
      e.data = CrashEvent{p.at("definition").get<int>()};
    } else if (kind == "trial_end") {
      const auto outcome = p.at("outcome").get<std::string>();
      if (outcome != "success" && outcome != "failure") {
        throw Error(ErrorCode::kProtocolError, "unknown outcome " + outcome);
      }
      e.data = TrialEndEvent{
          outcome == "success" ? Outcome::kSuccess : Outcome::kFailure,
          p.value("reason", std::string{})};
    } else {
      throw Error(ErrorCode::kProtocolError, "unknown event kind " + kind);
    }
    return e;
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::kProtocolError, std::string("bad log record: ") + ex.what());
  }
}

std::string event_to_line(const Event& event) { return event_to_json(event).dump(); }

void write_log(std::ostream& out, const TrialLog& log) {
  for (const auto& e : log.events()) out << event_to_line(e) << '\n';
}

TrialLog read_log(std::istream& in) {
  TrialLog log;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& ex) {
      throw Error(ErrorCode::kProtocolError,
                  "line " + std::to_string(line_no) + ": " + ex.what());
    }
    Event e = event_from_json(record);
    log.append(e.t, std::move(e.data));
  }
  return log;
}

void save_log(const std::filesystem::path& file, const TrialLog& log) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error(ErrorCode::kConfigError, "cannot write " + file.string());
  write_log(out, log);
}

TrialLog load_log(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::kConfigError, "cannot read " + file.string());
  return read_log(in);
}

}  // namespace aeroplan
