#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "ebsim/interferometer.hpp"

namespace ebsim {

struct ServerConfig {
  std::uint64_t seed{0};
  double events_per_second{1000.0};
  OutputMode mode{OutputMode::deterministic};
  std::array<double, 4> phases_deg{};
  BeamSplitterParams params{};
  /// Start with the event clock stopped; `step` and `resume` still work.
  bool start_paused{false};
};

/// Immutable copy of the simulation state at an event boundary.
struct Snapshot {
  std::uint64_t n{0};
  std::array<std::uint64_t, 6> counts{};
  std::array<double, 6> ratios{};
  std::array<double, 6> qm{};
  std::array<double, 4> phases_deg{};
  OutputMode mode{OutputMode::deterministic};
  int in_flight{0};

  /// Keys: n, counts, ratios, qm, phases, mode, inFlight.
  nlohmann::json to_json() const;
};

/// Protocol state of one connection, independent of any socket.
///
/// Each input line is a JSON object with a "type" field:
///   set_phase {index, degrees}   set_mode {mode}   set_rate {events_per_second}
///   reset_counters   reset_all   subscribe {cadence_ms}   query
///   step {events}   pause   resume
/// Any command except query/subscribe/pause/resume/step may carry "at", an
/// event index; it is then held back and applied just before that event.
/// Every line is answered with a snapshot, or {"error": ...} when the
/// command is rejected (the simulation is left untouched).
class Session {
 public:
  explicit Session(const ServerConfig& config);

  nlohmann::json handle_line(const std::string& line);

  /// Runs events one at a time, applying pinned commands on the way.
  void advance(std::uint64_t events);

  Snapshot snapshot() const;
  /// Events since start or the last reset_all; not cleared by reset_counters.
  std::uint64_t event_index() const { return event_index_; }
  double rate() const { return rate_; }
  bool paused() const { return paused_; }
  /// 0 when no subscription is active.
  std::uint64_t cadence_ms() const { return cadence_ms_; }
  std::size_t pending_commands() const { return pinned_.size(); }
  const Interferometer& simulation() const { return sim_; }

 private:
  void apply(const nlohmann::json& cmd);
  void apply_due();

  Interferometer sim_;
  std::array<double, 4> phases_deg_{};
  double rate_;
  bool paused_;
  std::uint64_t cadence_ms_{0};
  std::uint64_t event_index_{0};
  /// Pinned commands in arrival order; applied when event_index_ reaches "at".
  std::vector<std::pair<std::uint64_t, nlohmann::json>> pinned_;
};

/// Line-delimited JSON over TCP. Each connection owns its own Session and
/// simulation loop; a reader thread feeds received lines into that loop's
/// command queue, which is drained between events.
class Server {
 public:
  explicit Server(ServerConfig config);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds to 127.0.0.1 (or all interfaces) and starts accepting. Port 0
  /// picks a free port. Returns the bound port; throws std::runtime_error.
  std::uint16_t start(std::uint16_t port, bool all_interfaces = false);
  /// Closes the listener and every connection. Idempotent.
  void stop();

 private:
  struct Connection;
  void accept_loop();

  ServerConfig config_;
  int listen_fd_{-1};
  std::atomic<bool> running_{false};
  std::thread accept_thread_;
  std::mutex mutex_;
  std::vector<std::unique_ptr<Connection>> connections_;
};

}  // namespace ebsim
