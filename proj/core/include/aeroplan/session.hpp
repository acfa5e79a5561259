#pragma once

// A live planning session: one World shared by any number of clients.
// Transport-agnostic; the network layer hands in text frames and collects
// outgoing frames from each client's outbox. Single-threaded by design.

#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aeroplan/environment.hpp"
#include "aeroplan/protocol.hpp"
#include "aeroplan/world.hpp"

namespace aeroplan {

using ClientId = std::uint64_t;

struct SessionConfig {
  std::size_t command_queue_limit = 256;
  std::size_t outbox_limit = 1024;  // frames per client
  std::uint64_t state_every_ticks = 5;
  std::optional<std::string> token;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> log_dir;  // finished trial logs go here
};

// One inbound frame and the tick at which the session consumed it.
struct RecordedFrame {
  std::uint64_t tick = 0;
  ClientId client = 0;
  std::string text;
};

class Session {
 public:
  explicit Session(LabEnvironment env, SessionConfig config = {});

  // The new client's outbox starts with the env snapshot, then the path.
  ClientId connect();
  void disconnect(ClientId client);
  bool connected(ClientId client) const;
  std::vector<ClientId> clients() const;

  // Queues a frame for the next tick. A client that overruns the bounded
  // queue is disconnected.
  void receive(ClientId client, std::string_view text);

  // Consumes queued frames in arrival order, advances the world one step,
  // and emits telemetry.
  void tick();

  std::vector<std::string> take_outbox(ClientId client);
  // Clients dropped for overflow since the last call.
  std::vector<ClientId> take_dropped();

  const World& world() const { return world_; }
  const std::vector<RecordedFrame>& recording() const { return recording_; }
  const std::vector<TrialLog>& finished_trials() const { return finished_; }

 private:
  struct Client {
    bool authenticated = false;
    std::deque<std::string> outbox;
  };
  struct Inbound {
    ClientId client;
    std::string text;
  };

  void handle(ClientId client, const std::string& text);
  void send(ClientId client, const WireMessage& message);
  void broadcast(const WireMessage& message);
  void broadcast_path();
  void drop(ClientId client);
  void collect_finished_trial();

  SessionConfig config_;
  World world_;
  std::map<ClientId, Client> clients_;
  ClientId next_client_ = 1;
  std::deque<Inbound> queue_;
  std::vector<ClientId> dropped_;
  std::vector<RecordedFrame> recording_;
  std::vector<TrialLog> finished_;
  std::uint64_t broadcast_seq_ = 0;
  std::uint64_t trials_started_ = 0;
  bool trial_open_ = false;
};

// Replays a recording into a fresh session (clients are created on first
// use) and returns it after the last recorded tick plus `extra_ticks`.
Session replay_session(const LabEnvironment& env, SessionConfig config,
                       const std::vector<RecordedFrame>& frames,
                       std::uint64_t extra_ticks = 0);

void save_recording(const std::filesystem::path& file,
                    const std::vector<RecordedFrame>& frames);
std::vector<RecordedFrame> load_recording(const std::filesystem::path& file);

}  // namespace aeroplan
