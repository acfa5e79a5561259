#include "aeroplan/net/ws_server.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <deque>
#include <map>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "aeroplan/error.hpp"

namespace aeroplan::net {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using Clock = std::chrono::steady_clock;

namespace {

constexpr std::uint64_t kMaxTicksPerWake = 2000;
constexpr auto kMinWake = std::chrono::milliseconds(1);

}  // namespace

unsigned short default_port() {
  const char* v = std::getenv(kPortEnvVar);
  if (!v || !*v) return kDefaultPort;
  char* end = nullptr;
  const long port = std::strtol(v, &end, 10);
  if (*end != '\0' || port < 0 || port > 65535) {
    throw Error(ErrorCode::kConfigError,
                std::string(kPortEnvVar) + " is not a port number: " + v);
  }
  return static_cast<unsigned short>(port);
}

struct WsServer::Impl {
  class Connection : public std::enable_shared_from_this<Connection> {
   public:
    Connection(Impl& owner, tcp::socket socket)
        : owner_(owner), ws_(std::move(socket)) {}

    void start() {
      ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
      ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
        if (ec) return;
        self->id_ = self->owner_.session.connect();
        self->owner_.connections[self->id_] = self;
        self->read();
      });
    }

    void send(std::string frame) {
      if (closing_) return;
      if (queue_.size() >= owner_.write_queue_limit) {
        close();
        return;
      }
      queue_.push_back(std::move(frame));
      if (!writing_) write();
    }

    void close() {
      if (closing_) return;
      closing_ = true;
      owner_.forget(id_);
      ws_.async_close(websocket::close_code::policy_error,
                      [self = shared_from_this()](beast::error_code) {});
    }

    ClientId id() const { return id_; }

   private:
    void read() {
      ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec,
                                                           std::size_t) {
        if (ec) {
          self->owner_.forget(self->id_);
          return;
        }
        self->owner_.session.receive(self->id_, beast::buffers_to_string(self->buffer_.data()));
        self->buffer_.consume(self->buffer_.size());
        self->read();
      });
    }

    void write() {
      writing_ = true;
      ws_.text(true);
      ws_.async_write(asio::buffer(queue_.front()),
                      [self = shared_from_this()](beast::error_code ec, std::size_t) {
                        self->queue_.pop_front();
                        if (ec) {
                          self->writing_ = false;
                          self->owner_.forget(self->id_);
                          return;
                        }
                        if (self->queue_.empty()) {
                          self->writing_ = false;
                        } else {
                          self->write();
                        }
                      });
    }

    Impl& owner_;
    websocket::stream<beast::tcp_stream> ws_;
    beast::flat_buffer buffer_;
    std::deque<std::string> queue_;
    bool writing_ = false;
    bool closing_ = false;
    ClientId id_ = 0;
  };

  Impl(Session& s, ServeOptions o)
      : session(s), options(std::move(o)), acceptor(io), timer(io) {
    if (!(options.speed > 0.0)) {
      throw Error(ErrorCode::kConfigError, "speed must be positive");
    }
    try {
      const tcp::endpoint ep(asio::ip::make_address(options.address), options.port);
      acceptor.open(ep.protocol());
      acceptor.set_option(asio::socket_base::reuse_address(true));
      acceptor.bind(ep);
      acceptor.listen();
      bound_port = acceptor.local_endpoint().port();
    } catch (const boost::system::system_error& e) {
      throw Error(ErrorCode::kConfigError,
                  "cannot listen on " + options.address + ":" +
                      std::to_string(options.port) + ": " + e.what());
    }
    write_queue_limit = 1024;
  }

  void accept() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      std::make_shared<Connection>(*this, std::move(socket))->start();
      accept();
    });
  }

  void forget(ClientId id) {
    if (id == 0) return;
    connections.erase(id);
    session.disconnect(id);
  }

  void schedule() {
    const double dt = session.world().sim().vehicle.dt;
    const auto wake = std::max<Clock::duration>(
        std::chrono::duration_cast<Clock::duration>(
            std::chrono::duration<double>(dt / options.speed)),
        kMinWake);
    timer.expires_after(wake);
    timer.async_wait([this](beast::error_code ec) {
      if (ec) return;
      advance();
      schedule();
    });
  }

  void advance() {
    const double dt = session.world().sim().vehicle.dt;
    const double sim_elapsed =
        std::chrono::duration<double>(Clock::now() - started).count() * options.speed;
    const auto due = static_cast<std::uint64_t>(sim_elapsed / dt);
    std::uint64_t n = due > ticks ? due - ticks : 0;
    if (n > kMaxTicksPerWake) {
      // Fell behind; drop the backlog rather than spiral.
      ticks += n - kMaxTicksPerWake;
      n = kMaxTicksPerWake;
    }
    for (std::uint64_t i = 0; i < n; ++i) {
      session.tick();
      ++ticks;
    }
    flush();
  }

  void flush() {
    for (ClientId id : session.take_dropped()) {
      if (auto it = connections.find(id); it != connections.end()) {
        auto conn = it->second;
        conn->close();
      }
    }
    // Connection::send may erase from connections, so iterate a copy.
    auto live = connections;
    for (auto& [id, conn] : live) {
      for (auto& frame : session.take_outbox(id)) conn->send(std::move(frame));
    }
  }

  Session& session;
  ServeOptions options;
  asio::io_context io;
  tcp::acceptor acceptor;
  asio::steady_timer timer;
  std::map<ClientId, std::shared_ptr<Connection>> connections;
  std::size_t write_queue_limit = 0;
  Clock::time_point started;
  std::uint64_t ticks = 0;
  unsigned short bound_port = 0;
};

WsServer::WsServer(Session& session, ServeOptions options)
    : impl_(std::make_unique<Impl>(session, std::move(options))) {}

WsServer::~WsServer() = default;

unsigned short WsServer::port() const { return impl_->bound_port; }

void WsServer::run() {
  impl_->started = Clock::now();
  impl_->ticks = 0;
  impl_->accept();
  impl_->schedule();
  impl_->io.run();
}

void WsServer::stop() {
  asio::post(impl_->io, [impl = impl_.get()] {
    beast::error_code ec;
    impl->acceptor.close(ec);
    impl->timer.cancel();
    impl->io.stop();
  });
}

}  // namespace aeroplan::net
