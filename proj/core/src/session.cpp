#include "aeroplan/session.hpp"

#include <cstdio>
#include <fstream>

#include "aeroplan/error.hpp"

namespace aeroplan {

using nlohmann::json;

namespace {

std::uint64_t best_effort_seq(std::string_view text) {
  const json j = json::parse(text, nullptr, false);
  if (j.is_object()) {
    if (auto it = j.find("seq"); it != j.end() && it->is_number_unsigned()) {
      return it->get<std::uint64_t>();
    }
  }
  return 0;
}

bool adds_waypoint(const Command& c) {
  return std::holds_alternative<AddWaypointCmd>(c) ||
         std::holds_alternative<AddWaypointIndirectCmd>(c);
}

}  // namespace

Session::Session(LabEnvironment env, SessionConfig config)
    : config_(std::move(config)), world_(std::move(env), config_.seed) {
  if (config_.state_every_ticks == 0) {
    throw Error(ErrorCode::kInvalidArgument, "state_every_ticks must be >= 1");
  }
}

ClientId Session::connect() {
  const ClientId id = next_client_++;
  clients_[id];
  send(id, {kProtocolVersion, "env", ++broadcast_seq_, to_payload(env_snapshot(world_.env()))});
  send(id, {kProtocolVersion, "path", ++broadcast_seq_,
            to_payload(path_snapshot(world_.path()))});
  return id;
}

void Session::disconnect(ClientId client) { clients_.erase(client); }

bool Session::connected(ClientId client) const { return clients_.count(client) > 0; }

std::vector<ClientId> Session::clients() const {
  std::vector<ClientId> out;
  for (const auto& [id, c] : clients_) out.push_back(id);
  return out;
}

void Session::receive(ClientId client, std::string_view text) {
  if (!connected(client)) return;
  if (queue_.size() >= config_.command_queue_limit) {
    drop(client);
    return;
  }
  queue_.push_back({client, std::string(text)});
}

void Session::tick() {
  while (!queue_.empty()) {
    Inbound in = std::move(queue_.front());
    queue_.pop_front();
    if (!connected(in.client)) continue;
    recording_.push_back({world_.tick(), in.client, in.text});
    handle(in.client, in.text);
  }
  world_.step();
  collect_finished_trial();
  if (world_.tick() % config_.state_every_ticks == 0) {
    broadcast({kProtocolVersion, "state", ++broadcast_seq_,
               to_payload(state_snapshot(world_))});
  }
}

void Session::handle(ClientId client, const std::string& text) {
  WireMessage m;
  try {
    m = decode(text);
  } catch (const Error& e) {
    send(client, {kProtocolVersion, "error", ++broadcast_seq_,
                  to_payload(error_reply(best_effort_seq(text), e.code(), e.detail()))});
    return;
  }
  auto reply_error = [&](ErrorCode code, std::string detail) {
    send(client, {kProtocolVersion, "error", ++broadcast_seq_,
                  to_payload(error_reply(m.seq, code, std::move(detail)))});
  };
  auto reply_ok = [&](OkMsg ok) {
    send(client, {kProtocolVersion, "ok", ++broadcast_seq_, to_payload(ok)});
  };

  const auto& types = message_types();
  if (std::find(types.begin(), types.end(), m.type) == types.end()) {
    reply_error(ErrorCode::kUnknownType, "unknown message type " + m.type);
    return;
  }
  if (!is_client_type(m.type)) {
    reply_error(ErrorCode::kProtocolError, m.type + " is sent by the server only");
    return;
  }

  try {
    if (m.type == "hello") {
      const HelloMsg hello = hello_from_payload(m.payload);
      if (config_.token && hello.token != config_.token) {
        reply_error(ErrorCode::kUnauthenticated, "bad session token");
        return;
      }
      clients_[client].authenticated = true;
      reply_ok({m.seq, world_.path().revision(), std::nullopt});
      return;
    }
    if (!clients_[client].authenticated) {
      reply_error(ErrorCode::kUnauthenticated, "send hello first");
      return;
    }
    if (m.type == "start_trial") {
      const StartTrialMsg st = start_trial_from_payload(m.payload);
      const std::uint64_t seed = st.seed.value_or(config_.seed + trials_started_);
      const bool was_open = trial_open_ && !world_.trial_ended();
      std::optional<TrialLog> abandoned;
      if (was_open) abandoned = *world_.trial_log();
      world_.start_trial(st.spec, seed, "session");
      if (abandoned) finished_.push_back(std::move(*abandoned));
      ++trials_started_;
      trial_open_ = true;
      reply_ok({m.seq, world_.path().revision(), std::nullopt});
      broadcast_path();
      return;
    }
    const Command command = command_from_payload(m.type, m.payload);
    const std::uint64_t before = world_.path().revision();
    const WaypointId next_id = world_.path().next_id();
    const std::uint64_t revision = world_.apply(command);
    OkMsg ok{m.seq, revision, std::nullopt};
    if (adds_waypoint(command)) ok.waypoint_id = next_id;
    reply_ok(ok);
    if (revision != before) broadcast_path();
  } catch (const Error& e) {
    reply_error(e.code(), e.detail());
  }
}

void Session::send(ClientId client, const WireMessage& message) {
  auto it = clients_.find(client);
  if (it == clients_.end()) return;
  if (it->second.outbox.size() >= config_.outbox_limit) {
    drop(client);
    return;
  }
  it->second.outbox.push_back(encode(message));
}

void Session::broadcast(const WireMessage& message) {
  const std::string frame = encode(message);
  std::vector<ClientId> overflow;
  for (auto& [id, c] : clients_) {
    if (c.outbox.size() >= config_.outbox_limit) {
      overflow.push_back(id);
    } else {
      c.outbox.push_back(frame);
    }
  }
  for (ClientId id : overflow) drop(id);
}

void Session::broadcast_path() {
  broadcast({kProtocolVersion, "path", ++broadcast_seq_,
             to_payload(path_snapshot(world_.path()))});
}

void Session::drop(ClientId client) {
  if (clients_.erase(client)) dropped_.push_back(client);
}

std::vector<std::string> Session::take_outbox(ClientId client) {
  auto it = clients_.find(client);
  if (it == clients_.end()) return {};
  std::vector<std::string> out(std::make_move_iterator(it->second.outbox.begin()),
                               std::make_move_iterator(it->second.outbox.end()));
  it->second.outbox.clear();
  return out;
}

std::vector<ClientId> Session::take_dropped() {
  std::vector<ClientId> out;
  out.swap(dropped_);
  return out;
}

void Session::collect_finished_trial() {
  if (!trial_open_ || !world_.trial_ended()) return;
  trial_open_ = false;
  finished_.push_back(*world_.trial_log());
  if (config_.log_dir) {
    std::filesystem::create_directories(*config_.log_dir);
    char name[32];
    std::snprintf(name, sizeof name, "trial-%03zu.jsonl", finished_.size());
    save_log(*config_.log_dir / name, finished_.back());
  }
}

Session replay_session(const LabEnvironment& env, SessionConfig config,
                       const std::vector<RecordedFrame>& frames,
                       std::uint64_t extra_ticks) {
  config.log_dir.reset();
  Session session(env, std::move(config));
  std::map<ClientId, ClientId> ids;
  for (const auto& f : frames) {
    while (session.world().tick() < f.tick) session.tick();
    auto it = ids.find(f.client);
    if (it == ids.end()) it = ids.emplace(f.client, session.connect()).first;
    session.receive(it->second, f.text);
  }
  if (!frames.empty()) session.tick();
  for (std::uint64_t i = 0; i < extra_ticks; ++i) session.tick();
  return session;
}

void save_recording(const std::filesystem::path& file,
                    const std::vector<RecordedFrame>& frames) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error(ErrorCode::kConfigError, "cannot write " + file.string());
  for (const auto& f : frames) {
    out << json{{"tick", f.tick}, {"client", f.client}, {"text", f.text}}.dump() << '\n';
  }
}

std::vector<RecordedFrame> load_recording(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::kConfigError, "cannot read " + file.string());
  std::vector<RecordedFrame> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      out.push_back({j.at("tick").get<std::uint64_t>(), j.at("client").get<ClientId>(),
                     j.at("text").get<std::string>()});
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kProtocolError, std::string("bad recording: ") + e.what());
    }
  }
  return out;
}

}  // namespace aeroplan
