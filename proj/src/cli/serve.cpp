#include "onevision/cli/serve.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <deque>
#include <future>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <system_error>
#include <thread>
#include <vector>

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/post.hpp>
#include <boost/asio/signal_set.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <spdlog/spdlog.h>

namespace onevision::cli {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

constexpr std::size_t kMaxQueuedFrames = 8;

}  // namespace

class LiveServer::Impl {
 public:
  class Client;

  explicit Impl(ServeOptions o) : options(std::move(o)), acceptor(ioc), signals(ioc) {
    if (!(options.speed > 0.0)) throw std::invalid_argument("--speed must be positive");
    if (options.frame_hz <= 0 || options.config.base_rate_hz % options.frame_hz != 0) {
      throw std::invalid_argument("frame rate must divide the base rate");
    }
  }

  unsigned short listen() {
    if (listening) return acceptor.local_endpoint().port();
    try {
      const tcp::endpoint endpoint(net::ip::make_address(options.address), options.port);
      acceptor.open(endpoint.protocol());
      acceptor.set_option(net::socket_base::reuse_address(true));
      acceptor.bind(endpoint);
      acceptor.listen(net::socket_base::max_listen_connections);
    } catch (const boost::system::system_error& e) {
      beast::error_code ignored;
      acceptor.close(ignored);
      throw std::system_error(e.code().value(), std::generic_category(), "bind");
    }
    listening = true;
    accept_next();
    const auto port = acceptor.local_endpoint().port();
    spdlog::info("serving {} on ws://{}:{}", options.config.task, options.address, port);
    return port;
  }

  void run();

  void enqueue(const sim::LiveEvent& e) {
    std::lock_guard lock(mu);
    if (e.kind == sim::LiveEventKind::Steer && !inbox.empty() && inbox.back().kind == sim::LiveEventKind::Steer) {
      inbox.back() = e;
    } else {
      inbox.push_back(e);
    }
  }

  void accept_next();
  void on_disconnect(const std::shared_ptr<Client>& client);

  ServeOptions options;
  net::io_context ioc;
  tcp::acceptor acceptor;
  net::signal_set signals;
  bool listening = false;
  std::atomic<bool> stopping{false};
  std::mutex mu;
  std::vector<sim::LiveEvent> inbox;
  std::shared_ptr<Client> active;  // network thread only
  std::unique_ptr<sim::LiveSession> live;
};

class LiveServer::Impl::Client : public std::enable_shared_from_this<Client> {
 public:
  Client(tcp::socket socket, Impl& server) : ws_(std::move(socket)), server_(server) {}

  void start() {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) { self->on_accept(ec); });
  }

  void send(std::string frame) {
    if (!open_) return;
    if (out_.size() >= kMaxQueuedFrames) return;
    out_.push_back(std::move(frame));
    if (out_.size() == 1) write_front();
  }

  void close() {
    if (!open_) return;
    open_ = false;
    ws_.async_close(websocket::close_code::going_away, [self = shared_from_this()](beast::error_code) {});
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    if (server_.active || server_.stopping) {
      spdlog::warn("refusing a second client");
      ws_.async_close(websocket::close_reason(websocket::close_code::try_again_later, "another client is in control"),
                      [self = shared_from_this()](beast::error_code) {});
      return;
    }
    server_.active = shared_from_this();
    open_ = true;
    spdlog::info("client connected");
    read_next();
  }

  void read_next() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_read(ec); });
  }

  void on_read(beast::error_code ec) {
    if (ec) {
      open_ = false;
      server_.on_disconnect(shared_from_this());
      return;
    }
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    std::size_t begin = 0;
    while (begin < text.size()) {
      auto end = text.find('\n', begin);
      if (end == std::string::npos) end = text.size();
      const std::string_view line(text.data() + begin, end - begin);
      begin = end + 1;
      if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
      try {
        if (auto e = sim::parse_client_message(line)) server_.enqueue(*e);
      } catch (const std::exception& err) {
        spdlog::warn("ignoring client message: {}", err.what());
      }
    }
    read_next();
  }

  void write_front() {
    ws_.text(true);
    ws_.async_write(net::buffer(out_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->out_.clear();
        return;
      }
      self->out_.pop_front();
      if (!self->out_.empty()) self->write_front();
    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  Impl& server_;
  beast::flat_buffer buffer_;
  std::deque<std::string> out_;
  bool open_ = false;
};

void LiveServer::Impl::accept_next() {
  acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;
    std::make_shared<Client>(std::move(socket), *this)->start();
    accept_next();
  });
}

void LiveServer::Impl::on_disconnect(const std::shared_ptr<Client>& client) {
  if (active != client) return;
  active.reset();
  spdlog::info("client disconnected");
  enqueue({0, sim::LiveEventKind::Disconnect});
}

void LiveServer::Impl::run() {
  listen();
  live = std::make_unique<sim::LiveSession>(options.config, options.live);
  if (options.handle_signals) {
    signals.add(SIGINT);
    signals.add(SIGTERM);
    signals.async_wait([this](beast::error_code ec, int) {
      if (!ec) stopping = true;
    });
  }
  std::promise<void> finished;
  auto net_done = finished.get_future();
  std::thread net_thread([this, &finished] {
    ioc.run();
    finished.set_value();
  });

  const Tick frame_every = options.config.base_rate_hz / options.frame_hz;
  const std::chrono::duration<double> period(1.0 / (options.config.base_rate_hz * options.speed));
  const auto start = std::chrono::steady_clock::now();
  bool lagging = false;
  try {
    while (!stopping && (options.max_ticks < 0 || live->now() < options.max_ticks)) {
      std::vector<sim::LiveEvent> due;
      {
        std::lock_guard lock(mu);
        due.swap(inbox);
      }
      for (const auto& e : due) live->submit(e);
      live->step();
      if (live->now() % frame_every == 0) {
        net::post(ioc, [this, frame = live->frame_json() + "\n"]() mutable {
          if (active) active->send(std::move(frame));
        });
      }
      const auto deadline =
          start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(period * static_cast<double>(live->now()));
      if (std::chrono::steady_clock::now() > deadline + std::chrono::milliseconds(100)) {
        if (!lagging) spdlog::warn("simulation is falling behind real time at speed {}", options.speed);
        lagging = true;
      }
      std::this_thread::sleep_until(deadline);
    }
  } catch (...) {
    net::post(ioc, [this] { ioc.stop(); });
    net_thread.join();
    throw;
  }

  net::post(ioc, [this] {
    beast::error_code ignored;
    acceptor.close(ignored);
    signals.cancel();
    if (active) active->close();
  });
  if (net_done.wait_for(std::chrono::seconds(2)) != std::future_status::ready) ioc.stop();
  net_thread.join();
}

LiveServer::LiveServer(ServeOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}
LiveServer::~LiveServer() = default;

unsigned short LiveServer::listen() { return impl_->listen(); }
void LiveServer::run() { impl_->run(); }
void LiveServer::stop() { impl_->stopping = true; }

const sim::LiveSession& LiveServer::session() const {
  if (!impl_->live) throw std::logic_error("the server has not run");
  return *impl_->live;
}

}  // namespace onevision::cli
