#include "ebsim/sim_server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstring>
#include <stdexcept>

namespace ebsim {
namespace {

using nlohmann::json;

constexpr double kMaxRate = 1e7;
constexpr std::uint64_t kMaxStep = 100'000'000;

double wrap_degrees(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  return r == 360.0 ? 0.0 : r;
}

// Validates a command without touching any state; throws std::invalid_argument.
void validate(const json& cmd) {
  if (!cmd.is_object()) throw std::invalid_argument("command must be a JSON object");
  if (!cmd.contains("type") || !cmd["type"].is_string()) throw std::invalid_argument("missing string field 'type'");
  const auto type = cmd["type"].get<std::string>();
  const auto number = [&](const char* key) {
    if (!cmd.contains(key) || !cmd[key].is_number()) {
      throw std::invalid_argument(type + " needs numeric field '" + key + "'");
    }
    const double v = cmd[key].get<double>();
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(key) + " must be finite");
    return v;
  };
  const auto count = [&](const char* key) {
    if (!cmd.contains(key) || !cmd[key].is_number_unsigned()) {
      throw std::invalid_argument(type + " needs non-negative integer field '" + key + "'");
    }
    return cmd[key].get<std::uint64_t>();
  };

  if (type == "set_phase") {
    if (!cmd.contains("index") || !cmd["index"].is_number_integer()) {
      throw std::invalid_argument("set_phase needs integer field 'index'");
    }
    const auto index = cmd["index"].get<std::int64_t>();
    if (index < 0 || index > 3) throw std::invalid_argument("phase index must be 0..3");
    number("degrees");
  } else if (type == "set_mode") {
    if (!cmd.contains("mode") || !cmd["mode"].is_string()) throw std::invalid_argument("set_mode needs string field 'mode'");
    output_mode_from_string(cmd["mode"].get<std::string>());
  } else if (type == "set_rate") {
    const double r = number("events_per_second");
    if (!(r > 0.0 && r <= kMaxRate)) throw std::invalid_argument("events_per_second must lie in (0, 1e7]");
  } else if (type == "subscribe") {
    count("cadence_ms");
  } else if (type == "step") {
    if (count("events") > kMaxStep) throw std::invalid_argument("step is limited to 1e8 events");
  } else if (type != "reset_counters" && type != "reset_all" && type != "query" && type != "pause" &&
             type != "resume") {
    throw std::invalid_argument("unknown command type '" + type + "'");
  }
  if (cmd.contains("at")) {
    if (!cmd["at"].is_number_unsigned()) throw std::invalid_argument("'at' must be a non-negative integer");
    if (type == "query" || type == "subscribe" || type == "step" || type == "pause" || type == "resume") {
      throw std::invalid_argument(type + " cannot be pinned to an event");
    }
  }
}

}  // namespace

json Snapshot::to_json() const {
  return json{{"n", n},
              {"counts", counts},
              {"ratios", ratios},
              {"qm", qm},
              {"phases", phases_deg},
              {"mode", std::string(to_string(mode))},
              {"inFlight", in_flight}};
}

Session::Session(const ServerConfig& config)
    : sim_([&] {
        std::array<double, 4> rad{};
        for (std::size_t j = 0; j < 4; ++j) rad[j] = deg_to_rad(config.phases_deg[j]);
        return Interferometer(build_two_mzi(rad), config.mode, config.seed, config.params);
      }()),
      rate_(config.events_per_second),
      paused_(config.start_paused) {
  if (!(rate_ > 0.0 && rate_ <= kMaxRate)) throw std::invalid_argument("events_per_second must lie in (0, 1e7]");
  for (std::size_t j = 0; j < 4; ++j) phases_deg_[j] = wrap_degrees(config.phases_deg[j]);
}

json Session::handle_line(const std::string& line) {
  json cmd;
  try {
    cmd = json::parse(line);
    validate(cmd);
  } catch (const std::exception& e) {
    return json{{"error", e.what()}};
  }
  const auto type = cmd["type"].get<std::string>();
  if (cmd.contains("at") && cmd["at"].get<std::uint64_t>() > event_index_) {
    pinned_.emplace_back(cmd["at"].get<std::uint64_t>(), cmd);
  } else if (type == "step") {
    advance(cmd["events"].get<std::uint64_t>());
  } else {
    apply(cmd);
  }
  return snapshot().to_json();
}

void Session::apply(const json& cmd) {
  const auto type = cmd["type"].get<std::string>();
  if (type == "set_phase") {
    const auto index = cmd["index"].get<std::size_t>();
    phases_deg_[index] = wrap_degrees(cmd["degrees"].get<double>());
    sim_.set_phase(index, deg_to_rad(phases_deg_[index]));
  } else if (type == "set_mode") {
    sim_.set_mode(output_mode_from_string(cmd["mode"].get<std::string>()));
  } else if (type == "set_rate") {
    rate_ = cmd["events_per_second"].get<double>();
  } else if (type == "reset_counters") {
    sim_.reset_counters();
  } else if (type == "reset_all") {
    sim_.reset_all();
    event_index_ = 0;
    pinned_.clear();
  } else if (type == "subscribe") {
    cadence_ms_ = cmd["cadence_ms"].get<std::uint64_t>();
  } else if (type == "pause") {
    paused_ = true;
  } else if (type == "resume") {
    paused_ = false;
  }
}

void Session::apply_due() {
  while (true) {
    auto it = std::find_if(pinned_.begin(), pinned_.end(), [&](const auto& p) { return p.first <= event_index_; });
    if (it == pinned_.end()) return;
    const json cmd = std::move(it->second);
    pinned_.erase(it);
    apply(cmd);
  }
}

void Session::advance(std::uint64_t events) {
  for (std::uint64_t i = 0; i < events; ++i) {
    apply_due();
    sim_.emit_one();
    ++event_index_;
  }
  apply_due();
}

Snapshot Session::snapshot() const {
  Snapshot s;
  const auto& c = sim_.counters();
  s.n = c.emitted;
  s.counts = c.detector_counts;
  for (std::size_t j = 0; j < 6; ++j) s.ratios[j] = c.ratio(j);
  s.qm = sim_.quantum_reference().probs;
  s.phases_deg = phases_deg_;
  s.mode = sim_.mode();
  s.in_flight = 0;
  return s;
}

struct Server::Connection {
  int fd;
  Session session;
  std::mutex mutex;
  std::condition_variable wake;
  std::deque<std::string> queue;
  bool closed{false};
  std::atomic<bool> finished{false};
  std::thread reader;
  std::thread loop;

  Connection(int socket, const ServerConfig& config) : fd(socket), session(config) {}

  bool send_line(const json& j) {
    std::string text = j.dump();
    text.push_back('\n');
    std::size_t sent = 0;
    while (sent < text.size()) {
      const ssize_t k = ::send(fd, text.data() + sent, text.size() - sent, MSG_NOSIGNAL);
      if (k <= 0) return false;
      sent += static_cast<std::size_t>(k);
    }
    return true;
  }

  void read_lines() {
    std::string buffer;
    char chunk[4096];
    while (true) {
      const ssize_t k = ::recv(fd, chunk, sizeof chunk, 0);
      if (k <= 0) break;
      buffer.append(chunk, static_cast<std::size_t>(k));
      std::size_t pos;
      while ((pos = buffer.find('\n')) != std::string::npos) {
        std::string line = buffer.substr(0, pos);
        buffer.erase(0, pos + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::lock_guard lock(mutex);
        queue.push_back(std::move(line));
        wake.notify_one();
      }
    }
    std::lock_guard lock(mutex);
    closed = true;
    wake.notify_one();
  }

  void run() {
    using clock = std::chrono::steady_clock;
    auto last = clock::now();
    auto next_snapshot = last;
    double owed = 0.0;
    bool ok = true;
    while (ok) {
      std::deque<std::string> lines;
      {
        std::unique_lock lock(mutex);
        if (closed && queue.empty()) break;
        lines.swap(queue);
      }
      for (const auto& line : lines) {
        const std::uint64_t before = session.cadence_ms();
        ok = ok && send_line(session.handle_line(line));
        if (session.cadence_ms() != before) next_snapshot = clock::now();
      }

      const auto now = clock::now();
      if (!session.paused()) {
        owed += session.rate() * std::chrono::duration<double>(now - last).count();
        // Drop backlog beyond a quarter second so commands stay responsive.
        owed = std::min(owed, std::max(1.0, session.rate() / 4.0));
        const auto due = static_cast<std::uint64_t>(owed);
        session.advance(due);
        owed -= static_cast<double>(due);
      }
      last = now;

      if (session.cadence_ms() > 0 && now >= next_snapshot) {
        ok = ok && send_line(session.snapshot().to_json());
        next_snapshot = now + std::chrono::milliseconds(session.cadence_ms());
      }

      auto until = now + std::chrono::milliseconds(50);
      if (!session.paused()) until = std::min(until, now + std::chrono::milliseconds(1));
      if (session.cadence_ms() > 0) until = std::min(until, next_snapshot);
      std::unique_lock lock(mutex);
      wake.wait_until(lock, until, [&] { return !queue.empty() || closed; });
    }
    ::shutdown(fd, SHUT_RDWR);
    finished = true;
  }
};

Server::Server(ServerConfig config) : config_(std::move(config)) {
  Session probe(config_);  // validates the configuration up front
}

Server::~Server() { stop(); }

std::uint16_t Server::start(std::uint16_t port, bool all_interfaces) {
  if (running_) throw std::logic_error("server already started");
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw std::runtime_error(std::string("socket: ") + std::strerror(errno));
  const int yes = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  addr.sin_addr.s_addr = htonl(all_interfaces ? INADDR_ANY : INADDR_LOOPBACK);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(listen_fd_, 16) < 0) {
    const std::string msg = std::strerror(errno);
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw std::runtime_error("cannot listen on port " + std::to_string(port) + ": " + msg);
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  running_ = true;
  accept_thread_ = std::thread([this] { accept_loop(); });
  return ntohs(addr.sin_port);
}

void Server::accept_loop() {
  while (running_) {
    pollfd p{listen_fd_, POLLIN, 0};
    if (::poll(&p, 1, 100) <= 0) continue;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    std::lock_guard lock(mutex_);
    // Reap finished connections before adding a new one.
    std::erase_if(connections_, [](const std::unique_ptr<Connection>& c) {
      if (!c->finished) return false;
      c->reader.join();
      c->loop.join();
      ::close(c->fd);
      return true;
    });
    auto conn = std::make_unique<Connection>(fd, config_);
    Connection* raw = conn.get();
    raw->reader = std::thread([raw] { raw->read_lines(); });
    raw->loop = std::thread([raw] { raw->run(); });
    connections_.push_back(std::move(conn));
  }
}

void Server::stop() {
  if (!running_.exchange(false)) return;
  if (accept_thread_.joinable()) accept_thread_.join();
  ::close(listen_fd_);
  listen_fd_ = -1;
  std::lock_guard lock(mutex_);
  for (auto& c : connections_) {
    ::shutdown(c->fd, SHUT_RDWR);
    {
      std::lock_guard inner(c->mutex);
      c->closed = true;
      c->queue.clear();
    }
    c->wake.notify_one();
  }
  for (auto& c : connections_) {
    c->reader.join();
    c->loop.join();
    ::close(c->fd);
  }
  connections_.clear();
}

}  // namespace ebsim
