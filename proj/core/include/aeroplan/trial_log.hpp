#pragma once

// Append-only event record of one trial. Every reported measure (planning
// time, crash counts, success) is derived from these logs, and the command
// events they carry are enough to re-run the trial bit-for-bit.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "aeroplan/commands.hpp"
#include "aeroplan/detection.hpp"
#include "aeroplan/environment.hpp"

namespace aeroplan {

struct TrialStartEvent {
  std::uint64_t seed = 0;
  TrialSpec spec;
  std::string agent;
  WaypointId first_waypoint_id = 1;
  std::uint64_t base_revision = 0;
  LabEnvironment environment;
};

struct CommandEvent {
  std::uint64_t tick = 0;  // ticks since trial start
  Command command;
};

struct PathEditEvent {
  std::uint64_t revision = 0;
};

struct TakeoffEvent {};
struct LandEvent {};

struct TraversalEvent {
  std::string hoop;
  TraversalDirection direction = 1;
};

struct CollisionEvent {
  Collision collision;
};

struct CrashEvent {
  int definition = 1;  // 1: rotor-hoop; 2: hoop contact then floor
};

enum class Outcome { kSuccess, kFailure };
std::string_view to_string(Outcome outcome);

struct TrialEndEvent {
  Outcome outcome = Outcome::kFailure;
  std::string reason;
};

using EventData =
    std::variant<TrialStartEvent, CommandEvent, PathEditEvent, TakeoffEvent,
                 LandEvent, TraversalEvent, CollisionEvent, CrashEvent,
                 TrialEndEvent>;

struct Event {
  double t = 0.0;  // s since trial start
  EventData data;
};

std::string_view event_kind(const EventData& data);

class TrialLog {
 public:
  // Throws kInvalidArgument if t decreases or the trial already ended.
  void append(double t, EventData data);

  const std::vector<Event>& events() const { return events_; }
  bool ended() const { return end_index_.has_value(); }
  const TrialEndEvent* end() const;
  std::optional<double> end_time() const;
  const TrialStartEvent* start() const;

  std::vector<CommandEvent> commands() const;
  std::vector<std::string> traversals() const;

 private:
  std::vector<Event> events_;
  std::optional<std::size_t> end_index_;
};

struct CrashDeclared {
  double t = 0.0;
  int definition = 1;
  friend bool operator==(const CrashDeclared&, const CrashDeclared&) = default;
};

// Definition 1 fires at the first rotor-hoop contact. Definition 2 fires at a
// floor contact that follows a hoop contact (body or rotor) by at most
// ground_window seconds. The earliest declaration wins; on a tie,
// definition 1.
std::optional<CrashDeclared> classify_crash(const TrialLog& log,
                                            double ground_window);

// Number of leading required labels matched, in order, as a subsequence of
// the observed traversals (extra traversals in between are ignored).
std::size_t matched_prefix(std::span<const std::string> traversals,
                           std::span<const std::string> required);
bool sequence_satisfied(std::span<const std::string> traversals,
                        std::span<const std::string> required);

// One JSON object per line: {"t": ..., "kind": ..., "payload": {...}}.
nlohmann::json event_to_json(const Event& event);
Event event_from_json(const nlohmann::json& record);
std::string event_to_line(const Event& event);

void write_log(std::ostream& out, const TrialLog& log);
TrialLog read_log(std::istream& in);
void save_log(const std::filesystem::path& file, const TrialLog& log);
TrialLog load_log(const std::filesystem::path& file);

}  // namespace aeroplan
