#pragma once

// Wire protocol between the server and interface clients. Every frame is one
// UTF-8 JSON object {"v": 1, "type": ..., "seq": ..., "payload": {...}}.
// Encoding is canonical (sorted keys, shortest round-trip numbers), so a
// decoded and re-encoded message is byte-identical.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "aeroplan/commands.hpp"
#include "aeroplan/environment.hpp"
#include "aeroplan/error.hpp"
#include "aeroplan/flightpath.hpp"
#include "aeroplan/vehicle.hpp"

namespace aeroplan {

class World;

inline constexpr int kProtocolVersion = 1;

struct WireMessage {
  int v = kProtocolVersion;
  std::string type;
  std::uint64_t seq = 0;
  nlohmann::json payload = nlohmann::json::object();
};

std::string encode(const WireMessage& message);
// Throws kProtocolError for malformed JSON, missing fields or a version
// other than 1.
WireMessage decode(std::string_view text);

// --- Typed payloads -------------------------------------------------------------

struct HelloMsg {
  std::optional<std::string> token;
  friend bool operator==(const HelloMsg&, const HelloMsg&) = default;
};

struct EnvMsg {
  Box bounds;
  Vec3 start;
  std::vector<Hoop> hoops;
  friend bool operator==(const EnvMsg&, const EnvMsg&) = default;
};

struct PathMsg {
  std::uint64_t revision = 0;
  std::vector<Waypoint> waypoints;
  friend bool operator==(const PathMsg&, const PathMsg&) = default;
};

struct TrialInfo {
  bool active = false;
  std::size_t progress = 0;
  std::size_t required = 0;
  double elapsed = 0.0;
  std::optional<std::string> outcome;
  std::string reason;
  friend bool operator==(const TrialInfo&, const TrialInfo&) = default;
};

struct StateMsg {
  double t = 0.0;
  Vec3 pos;
  Vec3 vel;
  FlightMode mode = FlightMode::kGrounded;
  std::uint64_t revision = 0;
  bool manual = false;
  std::optional<TrialInfo> trial;
  friend bool operator==(const StateMsg&, const StateMsg&) = default;
};

struct StartTrialMsg {
  TrialSpec spec;
  std::optional<std::uint64_t> seed;
  friend bool operator==(const StartTrialMsg&, const StartTrialMsg&) = default;
};

struct OkMsg {
  std::uint64_t seq = 0;
  std::optional<std::uint64_t> revision;
  std::optional<WaypointId> waypoint_id;
  friend bool operator==(const OkMsg&, const OkMsg&) = default;
};

struct ErrorMsg {
  std::uint64_t seq = 0;
  std::string code;
  std::string detail;
  friend bool operator==(const ErrorMsg&, const ErrorMsg&) = default;
};

nlohmann::json to_payload(const HelloMsg& m);
nlohmann::json to_payload(const EnvMsg& m);
nlohmann::json to_payload(const PathMsg& m);
nlohmann::json to_payload(const StateMsg& m);
nlohmann::json to_payload(const StartTrialMsg& m);
nlohmann::json to_payload(const OkMsg& m);
nlohmann::json to_payload(const ErrorMsg& m);

// Each throws kProtocolError on a malformed payload.
HelloMsg hello_from_payload(const nlohmann::json& p);
EnvMsg env_from_payload(const nlohmann::json& p);
PathMsg path_from_payload(const nlohmann::json& p);
StateMsg state_from_payload(const nlohmann::json& p);
StartTrialMsg start_trial_from_payload(const nlohmann::json& p);
OkMsg ok_from_payload(const nlohmann::json& p);
ErrorMsg error_from_payload(const nlohmann::json& p);

EnvMsg env_snapshot(const LabEnvironment& env);
PathMsg path_snapshot(const FlightPath& path);
StateMsg state_snapshot(const World& world);
ErrorMsg error_reply(std::uint64_t seq, ErrorCode code, std::string detail);

// Every message type, client-to-server and server-to-client.
const std::vector<std::string>& message_types();
bool is_client_type(std::string_view type);

}  // namespace aeroplan
