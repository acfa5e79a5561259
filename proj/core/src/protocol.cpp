#include "aeroplan/protocol.hpp"

#include <algorithm>

#include "aeroplan/world.hpp"

namespace aeroplan {

using nlohmann::json;

namespace {

template <class F>
auto guarded(std::string_view what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kProtocolError,
                "bad " + std::string(what) + " payload: " + e.what());
  }
}

void require_object(const json& p, std::string_view what) {
  if (!p.is_object()) {
    throw Error(ErrorCode::kProtocolError,
                std::string(what) + " payload must be an object");
  }
}

FlightMode mode_from(const json& j) {
  const auto name = j.get<std::string>();
  auto m = flight_mode_from_string(name);
  if (!m) throw Error(ErrorCode::kProtocolError, "unknown flight mode " + name);
  return *m;
}

}  // namespace

std::string encode(const WireMessage& m) {
  return json{{"v", m.v}, {"type", m.type}, {"seq", m.seq}, {"payload", m.payload}}
      .dump();
}

WireMessage decode(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kProtocolError, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kProtocolError, "message must be an object");
  return guarded("message", [&] {
    WireMessage m;
    m.v = j.at("v").get<int>();
    if (m.v != kProtocolVersion) {
      throw Error(ErrorCode::kProtocolError,
                  "unsupported protocol version " + std::to_string(m.v));
    }
    m.type = j.at("type").get<std::string>();
    if (!j.at("seq").is_number_unsigned()) {
      throw Error(ErrorCode::kProtocolError, "seq must be a non-negative integer");
    }
    m.seq = j.at("seq").get<std::uint64_t>();
    m.payload = j.value("payload", json::object());
    require_object(m.payload, m.type);
    return m;
  });
}

// --- to_payload ---------------------------------------------------------------

json to_payload(const HelloMsg& m) {
  json p = json::object();
  if (m.token) p["token"] = *m.token;
  return p;
}

json to_payload(const EnvMsg& m) {
  return json{{"bounds", {{"min", m.bounds.min}, {"max", m.bounds.max}}},
              {"start", m.start},
              {"hoops", m.hoops}};
}

json to_payload(const PathMsg& m) {
  json wps = json::array();
  for (const auto& w : m.waypoints) wps.push_back({{"id", w.id}, {"pos", w.position}});
  return json{{"revision", m.revision}, {"waypoints", std::move(wps)}};
}

json to_payload(const StateMsg& m) {
  json p{{"t", m.t},
         {"pos", m.pos},
         {"vel", m.vel},
         {"mode", std::string(to_string(m.mode))},
         {"revision", m.revision},
         {"manual", m.manual},
         {"trial", nullptr}};
  if (m.trial) {
    const auto& t = *m.trial;
    p["trial"] = json{{"active", t.active},
                      {"progress", t.progress},
                      {"required", t.required},
                      {"elapsed", t.elapsed},
                      {"outcome", t.outcome ? json(*t.outcome) : json(nullptr)},
                      {"reason", t.reason}};
  }
  return p;
}

json to_payload(const StartTrialMsg& m) {
  json p = m.spec;
  if (m.seed) p["seed"] = *m.seed;
  return p;
}

json to_payload(const OkMsg& m) {
  json p{{"seq", m.seq}};
  if (m.revision) p["revision"] = *m.revision;
  if (m.waypoint_id) p["waypoint_id"] = *m.waypoint_id;
  return p;
}

json to_payload(const ErrorMsg& m) {
  return json{{"seq", m.seq}, {"code", m.code}, {"detail", m.detail}};
}

// --- from_payload -------------------------------------------------------------

HelloMsg hello_from_payload(const json& p) {
  require_object(p, "hello");
  return guarded("hello", [&] {
    HelloMsg m;
    if (auto it = p.find("token"); it != p.end() && !it->is_null()) {
      m.token = it->get<std::string>();
    }
    return m;
  });
}

EnvMsg env_from_payload(const json& p) {
  require_object(p, "env");
  return guarded("env", [&] {
    EnvMsg m;
    p.at("bounds").at("min").get_to(m.bounds.min);
    p.at("bounds").at("max").get_to(m.bounds.max);
    p.at("start").get_to(m.start);
    p.at("hoops").get_to(m.hoops);
    return m;
  });
}

PathMsg path_from_payload(const json& p) {
  require_object(p, "path");
  return guarded("path", [&] {
    PathMsg m;
    m.revision = p.at("revision").get<std::uint64_t>();
    for (const auto& w : p.at("waypoints")) {
      m.waypoints.push_back({w.at("id").get<WaypointId>(), w.at("pos").get<Vec3>()});
    }
    return m;
  });
}

StateMsg state_from_payload(const json& p) {
  require_object(p, "state");
  return guarded("state", [&] {
    StateMsg m;
    m.t = p.at("t").get<double>();
    p.at("pos").get_to(m.pos);
    p.at("vel").get_to(m.vel);
    m.mode = mode_from(p.at("mode"));
    m.revision = p.at("revision").get<std::uint64_t>();
    m.manual = p.value("manual", false);
    if (auto it = p.find("trial"); it != p.end() && !it->is_null()) {
      TrialInfo t;
      t.active = it->at("active").get<bool>();
      t.progress = it->at("progress").get<std::size_t>();
      t.required = it->at("required").get<std::size_t>();
      t.elapsed = it->at("elapsed").get<double>();
      if (auto o = it->find("outcome"); o != it->end() && !o->is_null()) {
        t.outcome = o->get<std::string>();
      }
      t.reason = it->value("reason", std::string{});
      m.trial = t;
    }
    return m;
  });
}

StartTrialMsg start_trial_from_payload(const json& p) {
  require_object(p, "start_trial");
  return guarded("start_trial", [&] {
    StartTrialMsg m;
    try {
      m.spec = p.get<TrialSpec>();
    } catch (const Error& e) {
      throw Error(ErrorCode::kProtocolError, e.detail());
    }
    if (auto it = p.find("seed"); it != p.end() && !it->is_null()) {
      m.seed = it->get<std::uint64_t>();
    }
    return m;
  });
}

OkMsg ok_from_payload(const json& p) {
  require_object(p, "ok");
  return guarded("ok", [&] {
    OkMsg m;
    m.seq = p.at("seq").get<std::uint64_t>();
    if (auto it = p.find("revision"); it != p.end()) m.revision = it->get<std::uint64_t>();
    if (auto it = p.find("waypoint_id"); it != p.end()) {
      m.waypoint_id = it->get<WaypointId>();
    }
    return m;
  });
}

ErrorMsg error_from_payload(const json& p) {
  require_object(p, "error");
  return guarded("error", [&] {
    return ErrorMsg{p.at("seq").get<std::uint64_t>(), p.at("code").get<std::string>(),
                    p.value("detail", std::string{})};
  });
}

// --- Snapshots ----------------------------------------------------------------

EnvMsg env_snapshot(const LabEnvironment& env) {
  return {env.bounds, env.start, env.hoops};
}

PathMsg path_snapshot(const FlightPath& path) {
  return {path.revision(), {path.waypoints().begin(), path.waypoints().end()}};
}

StateMsg state_snapshot(const World& world) {
  StateMsg m;
  m.t = world.time();
  m.pos = world.drone().position;
  m.vel = world.drone().velocity;
  m.mode = world.drone().mode;
  m.revision = world.path().revision();
  m.manual = world.manual();
  if (world.trial_spec()) {
    const TrialStatus s = world.trial_status();
    TrialInfo t;
    t.active = s.active;
    t.progress = s.progress;
    t.required = s.required;
    t.elapsed = s.elapsed;
    if (s.outcome) t.outcome = std::string(to_string(*s.outcome));
    t.reason = s.reason;
    m.trial = t;
  }
  return m;
}

ErrorMsg error_reply(std::uint64_t seq, ErrorCode code, std::string detail) {
  return {seq, std::string(to_string(code)), std::move(detail)};
}

const std::vector<std::string>& message_types() {
  static const std::vector<std::string> types{
      "hello",       "env",           "path",
      "state",       "add_waypoint",  "add_waypoint_indirect",
      "move_waypoint", "delete_waypoint", "takeoff",
      "land",        "joystick",      "start_trial",
      "ok",          "error"};
  return types;
}

bool is_client_type(std::string_view type) {
  return type == "hello" || type == "start_trial" || is_command_type(type);
}

}  // namespace aeroplan
