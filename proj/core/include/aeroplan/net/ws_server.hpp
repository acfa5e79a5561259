#pragma once

// WebSocket front end for a Session. Everything (accept, reads, writes and
// the simulation clock) runs on one io_context thread, so the Session is
// never touched concurrently.

#include <cstdint>
#include <memory>
#include <string>

#include "aeroplan/session.hpp"

namespace aeroplan::net {

inline constexpr unsigned short kDefaultPort = 8765;
inline constexpr const char* kPortEnvVar = "AEROPLAN_PORT";

struct ServeOptions {
  std::string address = "127.0.0.1";
  unsigned short port = kDefaultPort;  // 0 picks a free port
  double speed = 1.0;                  // simulated seconds per wall second
};

// Port from AEROPLAN_PORT, else kDefaultPort. Throws kConfigError for a
// value that is not a port number.
unsigned short default_port();

class WsServer {
 public:
  // Binds immediately; throws kConfigError if the address is unusable or
  // speed is not positive.
  WsServer(Session& session, ServeOptions options);
  ~WsServer();
  WsServer(const WsServer&) = delete;
  WsServer& operator=(const WsServer&) = delete;

  unsigned short port() const;

  // Blocks until stop() is called.
  void run();
  // Safe to call from any thread.
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace aeroplan::net
