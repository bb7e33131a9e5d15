#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "morph/scenario.hpp"

namespace morph {

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  double ticks_per_second = 10.0;  // <= 0 runs unpaced
  bool start_paused = false;
  std::optional<std::int64_t> max_ticks;  // stop advancing here
  std::optional<std::string> trace_path;
  std::optional<std::string> command_log_path;
  std::chrono::milliseconds heartbeat{1000};
};

/// A simulation run loop behind the /v1 HTTP interface:
///   GET  /v1/state              latest between-tick snapshot
///   POST /v1/command            queue a command, ack with its tick
///   GET  /v1/events?interval=k  server-sent snapshots every k ticks
///   GET  /v1/scenario           active scenario document
///   GET  /v1/commands           applied-tick log of world commands
class ControlServer {
 public:
  ControlServer(Scenario scenario, std::uint64_t seed, ServerOptions options);
  ~ControlServer();
  ControlServer(const ControlServer&) = delete;
  ControlServer& operator=(const ControlServer&) = delete;

  /// Binds and starts the run loop; returns the bound port.
  int start();
  /// Stops the loop and listener and finishes the trace. Idempotent.
  void stop();

  int port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace morph
