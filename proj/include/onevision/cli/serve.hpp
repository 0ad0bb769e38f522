#pragma once

#include <memory>
#include <string>

#include "onevision/sim/live.hpp"

namespace onevision::cli {

struct ServeOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 8765;  ///< 0 picks a free port
  double speed = 1.0;          ///< simulated seconds per wall-clock second
  int frame_hz = 20;
  Tick max_ticks = -1;         ///< negative runs until stop()
  bool handle_signals = false; ///< stop on SIGINT / SIGTERM
  sim::RunConfig config;
  sim::LiveOptions live;
};

/// Real-time websocket front end of a LiveSession. The simulation loop runs
/// on the caller of run(); the network runs on its own thread. The first
/// client to connect controls the leader; later clients are refused until it
/// leaves. Steering is latest-wins, formation switches are kept in order.
class LiveServer {
 public:
  explicit LiveServer(ServeOptions options);
  ~LiveServer();
  LiveServer(const LiveServer&) = delete;
  LiveServer& operator=(const LiveServer&) = delete;

  /// Binds and listens; throws std::system_error when the port is taken.
  /// Returns the bound port.
  unsigned short listen();
  /// Paces the simulation until max_ticks or stop(). Calls listen() first
  /// when needed.
  void run();
  /// Thread-safe; makes run() return after the current tick.
  void stop();

  /// Valid after run() returns.
  const sim::LiveSession& session() const;

 private:
  class Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace onevision::cli
