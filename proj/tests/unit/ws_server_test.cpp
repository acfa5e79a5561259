#include "aeroplan/net/ws_server.hpp"

#include <cstdlib>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <gtest/gtest.h>

#include "support/expect.hpp"

namespace aeroplan::net {
namespace {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

class ScopedEnv {
 public:
  ScopedEnv(const char* name, const char* value) : name_(name) {
    if (const char* old = std::getenv(name)) old_ = old;
    if (value) {
      setenv(name, value, 1);
    } else {
      unsetenv(name);
    }
  }
  ~ScopedEnv() {
    if (old_) {
      setenv(name_, old_->c_str(), 1);
    } else {
      unsetenv(name_);
    }
  }

 private:
  const char* name_;
  std::optional<std::string> old_;
};

TEST(DefaultPort, FromEnvironment) {
  {
    ScopedEnv e(kPortEnvVar, nullptr);
    EXPECT_EQ(default_port(), kDefaultPort);
  }
  {
    ScopedEnv e(kPortEnvVar, "9123");
    EXPECT_EQ(default_port(), 9123);
  }
  {
    ScopedEnv e(kPortEnvVar, "nine");
    testing::expect_code(ErrorCode::kConfigError, [] { default_port(); });
  }
  {
    ScopedEnv e(kPortEnvVar, "70000");
    testing::expect_code(ErrorCode::kConfigError, [] { default_port(); });
  }
}

TEST(WsServer, RejectsBadSpeed) {
  Session session(default_environment());
  testing::expect_code(ErrorCode::kConfigError,
                       [&] { WsServer(session, {"127.0.0.1", 0, 0.0}); });
}

WireMessage read_until(websocket::stream<tcp::socket>& ws, const std::string& type) {
  beast::flat_buffer buffer;
  for (int i = 0; i < 10000; ++i) {
    buffer.clear();
    ws.read(buffer);
    auto m = decode(beast::buffers_to_string(buffer.data()));
    if (m.type == type) return m;
  }
  throw std::runtime_error("no " + type + " frame");
}

TEST(WsServer, EndToEnd) {
  Session session(default_environment());
  WsServer server(session, {"127.0.0.1", 0, 4.0});
  ASSERT_NE(server.port(), 0);
  std::thread loop([&] { server.run(); });

  asio::io_context io;
  tcp::resolver resolver(io);
  websocket::stream<tcp::socket> ws(io);
  asio::connect(ws.next_layer(), resolver.resolve("127.0.0.1", std::to_string(server.port())));
  ws.handshake("127.0.0.1", "/");

  beast::flat_buffer buffer;
  ws.read(buffer);
  EXPECT_EQ(decode(beast::buffers_to_string(buffer.data())).type, "env");
  buffer.clear();
  ws.read(buffer);
  EXPECT_EQ(decode(beast::buffers_to_string(buffer.data())).type, "path");

  ws.text(true);
  ws.write(asio::buffer(encode({kProtocolVersion, "hello", 1, nlohmann::json::object()})));
  EXPECT_EQ(ok_from_payload(read_until(ws, "ok").payload).seq, 1u);
  ws.write(asio::buffer(
      encode({kProtocolVersion, "add_waypoint", 2, {{"pos", {1.0, 1.0, 1.0}}}})));
  const auto ok = ok_from_payload(read_until(ws, "ok").payload);
  EXPECT_EQ(ok.seq, 2u);
  EXPECT_EQ(ok.revision, 1u);
  EXPECT_EQ(path_from_payload(read_until(ws, "path").payload).revision, 1u);
  const auto state = state_from_payload(read_until(ws, "state").payload);
  EXPECT_EQ(state.revision, 1u);
  EXPECT_GT(state.t, 0.0);

  ws.close(websocket::close_code::normal);
  server.stop();
  loop.join();
  EXPECT_EQ(session.world().path().size(), 1u);
}

}  // namespace
}  // namespace aeroplan::net
