#include <doctest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <string>

#include "ebsim/sim_server.hpp"
#include "oracles.hpp"

using namespace ebsim;
using nlohmann::json;

namespace {

ServerConfig paused_config(std::uint64_t seed = 1) {
  ServerConfig cfg;
  cfg.seed = seed;
  cfg.start_paused = true;
  return cfg;
}

json send(Session& s, const json& cmd) { return s.handle_line(cmd.dump()); }

// Blocking line client for the TCP tests.
class Client {
 public:
  explicit Client(std::uint16_t port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    connected_ = ::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0;
  }
  ~Client() { ::close(fd_); }
  bool connected() const { return connected_; }

  void write(const std::string& text) { ::send(fd_, text.data(), text.size(), MSG_NOSIGNAL); }

  // Empty string on timeout or close.
  std::string read_line(int timeout_ms = 5000) {
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    while (true) {
      const auto pos = buffer_.find('\n');
      if (pos != std::string::npos) {
        std::string line = buffer_.substr(0, pos);
        buffer_.erase(0, pos + 1);
        return line;
      }
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) return {};
      pollfd p{fd_, POLLIN, 0};
      if (::poll(&p, 1, static_cast<int>(left.count())) <= 0) return {};
      char chunk[4096];
      const ssize_t k = ::recv(fd_, chunk, sizeof chunk, 0);
      if (k <= 0) return {};
      buffer_.append(chunk, static_cast<std::size_t>(k));
    }
  }

 private:
  int fd_;
  bool connected_{false};
  std::string buffer_;
};

}  // namespace

TEST_CASE("snapshot carries exactly the documented keys") {
  Session s(paused_config());
  const auto snap = send(s, {{"type", "query"}});
  CHECK(snap.size() == 7);
  for (const char* key : {"n", "counts", "ratios", "qm", "phases", "mode", "inFlight"}) CHECK(snap.contains(key));
  CHECK(snap["n"] == 0);
  CHECK(snap["counts"].size() == 6);
  CHECK(snap["qm"].size() == 6);
  CHECK(snap["phases"].size() == 4);
  CHECK(snap["mode"] == "deterministic");
  CHECK(snap["inFlight"] == 0);
}

TEST_CASE("qm field matches the matrix-product oracle") {
  ServerConfig cfg = paused_config();
  cfg.phases_deg = {152, 302, 0, 342};
  Session s(cfg);
  const auto snap = send(s, {{"type", "query"}});
  const auto ref = oracle::mzi_probabilities({deg_to_rad(152), deg_to_rad(302), 0, deg_to_rad(342)});
  for (std::size_t j = 0; j < 6; ++j) CHECK(snap["qm"][j].get<double>() == doctest::Approx(ref[j]).epsilon(1e-12));
}

TEST_CASE("step advances exactly and counters stay consistent") {
  Session s(paused_config());
  auto snap = send(s, {{"type", "step"}, {"events", 1234}});
  CHECK(snap["n"] == 1234);
  const auto c = snap["counts"];
  CHECK(c[0].get<std::uint64_t>() + c[1].get<std::uint64_t>() == 1234);
  CHECK(c[4].get<std::uint64_t>() + c[5].get<std::uint64_t>() == 1234);
  CHECK(snap["ratios"][3].get<double>() == doctest::Approx(c[3].get<double>() / 1234.0));
  CHECK(s.event_index() == 1234);
}

TEST_CASE("set_phase changes qm immediately without touching counters") {
  Session s(paused_config());
  send(s, {{"type", "step"}, {"events", 3000}});
  const auto before = send(s, {{"type", "query"}});
  const auto after = send(s, {{"type", "set_phase"}, {"index", 0}, {"degrees", 60}});
  CHECK(after["counts"] == before["counts"]);
  CHECK(after["phases"][0] == 60.0);
  const auto ref = oracle::mzi_probabilities({deg_to_rad(60), 0, 0, 0});
  for (std::size_t j = 0; j < 6; ++j) CHECK(after["qm"][j].get<double>() == doctest::Approx(ref[j]).epsilon(1e-12));
  CHECK(after["qm"] != before["qm"]);

  CHECK(send(s, {{"type", "set_phase"}, {"index", 2}, {"degrees", -90}})["phases"][2] == 270.0);
  CHECK(send(s, {{"type", "set_phase"}, {"index", 1}, {"degrees", 720}})["phases"][1] == 0.0);
}

TEST_CASE("ratios drift toward the new quantum probabilities after a live change") {
  Session s(paused_config(4));
  send(s, {{"type", "step"}, {"events", 20000}});
  send(s, {{"type", "set_phase"}, {"index", 2}, {"degrees", 180}});
  const auto start = send(s, {{"type", "reset_counters"}});
  CHECK(start["n"] == 0);
  const auto snap = send(s, {{"type", "step"}, {"events", 10000}});
  for (int j : {4, 5}) CHECK(std::abs(snap["ratios"][j].get<double>() - snap["qm"][j].get<double>()) < 0.02);
}

TEST_CASE("reset_counters keeps learned state, reset_all restarts from the seed") {
  Session s(paused_config(9));
  send(s, {{"type", "step"}, {"events", 5000}});
  const auto w = s.simulation().beam_splitters()[1].weights();
  const auto x = s.simulation().beam_splitters()[2].output_dlm().x;
  const auto cleared = send(s, {{"type", "reset_counters"}});
  CHECK(cleared["n"] == 0);
  for (const auto& v : cleared["counts"]) CHECK(v == 0);
  CHECK(s.simulation().beam_splitters()[1].weights() == w);
  CHECK(s.simulation().beam_splitters()[2].output_dlm().x == x);
  CHECK(s.event_index() == 5000);

  send(s, {{"type", "reset_all"}});
  CHECK(s.event_index() == 0);
  Session fresh(paused_config(9));
  CHECK(send(s, {{"type", "step"}, {"events", 700}}) == send(fresh, {{"type", "step"}, {"events", 700}}));
}

TEST_CASE("emitted count is monotone between resets") {
  Session s(paused_config());
  std::uint64_t last = 0;
  for (int i = 0; i < 20; ++i) {
    const auto n = send(s, {{"type", "step"}, {"events", 37 * i}})["n"].get<std::uint64_t>();
    CHECK(n >= last);
    last = n;
  }
}

TEST_CASE("mode, rate, pause and subscription controls") {
  ServerConfig cfg;
  Session s(cfg);
  CHECK_FALSE(s.paused());
  CHECK(send(s, {{"type", "set_mode"}, {"mode", "probabilistic"}})["mode"] == "probabilistic");
  CHECK(s.simulation().mode() == OutputMode::probabilistic);
  send(s, {{"type", "set_rate"}, {"events_per_second", 250.5}});
  CHECK(s.rate() == 250.5);
  send(s, {{"type", "pause"}});
  CHECK(s.paused());
  send(s, {{"type", "resume"}});
  CHECK_FALSE(s.paused());
  send(s, {{"type", "subscribe"}, {"cadence_ms", 40}});
  CHECK(s.cadence_ms() == 40);
  send(s, {{"type", "subscribe"}, {"cadence_ms", 0}});
  CHECK(s.cadence_ms() == 0);
}

TEST_CASE("rejected commands leave the session untouched") {
  Session s(paused_config());
  send(s, {{"type", "step"}, {"events", 100}});
  const auto before = send(s, {{"type", "query"}});
  const char* bad[] = {
      "not json",
      "[1,2]",
      R"({"index":1})",
      R"({"type":"launch"})",
      R"({"type":"set_phase","index":4,"degrees":10})",
      R"({"type":"set_phase","index":-1,"degrees":10})",
      R"({"type":"set_phase","index":1})",
      R"({"type":"set_phase","index":1,"degrees":"ten"})",
      R"({"type":"set_mode","mode":"quantum"})",
      R"({"type":"set_rate","events_per_second":0})",
      R"({"type":"set_rate","events_per_second":1e8})",
      R"({"type":"step","events":-5})",
      R"({"type":"step","events":200000000})",
      R"({"type":"subscribe","cadence_ms":-1})",
      R"({"type":"query","at":500})",
      R"({"type":"step","events":10,"at":500})",
      R"({"type":"reset_counters","at":-3})",
  };
  for (const char* line : bad) {
    const auto reply = s.handle_line(line);
    CHECK_MESSAGE(reply.contains("error"), line);
    CHECK(reply["error"].is_string());
  }
  CHECK(send(s, {{"type", "query"}}) == before);
  CHECK(s.pending_commands() == 0);
  CHECK(s.rate() == 1000.0);
}

TEST_CASE("pinned commands apply at their event index") {
  Session s(paused_config());
  send(s, {{"type", "set_phase"}, {"index", 3}, {"degrees", 90}, {"at", 150}});
  send(s, {{"type", "reset_counters"}, {"at", 200}});
  CHECK(s.pending_commands() == 2);
  CHECK(send(s, {{"type", "step"}, {"events", 149}})["phases"][3] == 0.0);
  CHECK(send(s, {{"type", "step"}, {"events", 1}})["phases"][3] == 90.0);
  CHECK(s.pending_commands() == 1);
  const auto snap = send(s, {{"type", "step"}, {"events", 80}});
  CHECK(snap["n"] == 30);
  CHECK(s.pending_commands() == 0);

  // An index already passed applies at once.
  CHECK(send(s, {{"type", "set_phase"}, {"index", 0}, {"degrees", 45}, {"at", 10}})["phases"][0] == 45.0);
}

TEST_CASE("the same pinned script gives bit-identical counters") {
  const auto script = [] {
    Session s(paused_config(21));
    send(s, {{"type", "set_phase"}, {"index", 1}, {"degrees", 77}, {"at", 1000}});
    send(s, {{"type", "set_mode"}, {"mode", "probabilistic"}, {"at", 2500}});
    send(s, {{"type", "set_phase"}, {"index", 2}, {"degrees", 300}, {"at", 4000}});
    send(s, {{"type", "step"}, {"events", 1700}});
    send(s, {{"type", "step"}, {"events", 4300}});
    return send(s, {{"type", "query"}});
  };
  const auto a = script();
  CHECK(a == script());
  CHECK(a["n"] == 6000);
  CHECK(a["mode"] == "probabilistic");

  // Chunking of the steps does not matter.
  Session s(paused_config(21));
  send(s, {{"type", "set_phase"}, {"index", 1}, {"degrees", 77}, {"at", 1000}});
  send(s, {{"type", "set_mode"}, {"mode", "probabilistic"}, {"at", 2500}});
  send(s, {{"type", "set_phase"}, {"index", 2}, {"degrees", 300}, {"at", 4000}});
  for (int i = 0; i < 6; ++i) send(s, {{"type", "step"}, {"events", 1000}});
  CHECK(send(s, {{"type", "query"}}) == a);
}

TEST_CASE("bad configuration is rejected") {
  ServerConfig cfg;
  cfg.events_per_second = 0;
  CHECK_THROWS_AS(Session{cfg}, std::invalid_argument);
  CHECK_THROWS_AS(Server{cfg}, std::invalid_argument);
}

TEST_CASE("tcp round trip") {
  ServerConfig cfg = paused_config(3);
  cfg.phases_deg = {152, 302, 0, 342};
  Server server(cfg);
  const auto port = server.start(0);
  REQUIRE(port != 0);

  Client client(port);
  REQUIRE(client.connected());
  client.write("{\"type\":\"step\",\"events\":500}\r\n{\"type\":\"query\"}\n");
  const auto first = json::parse(client.read_line());
  CHECK(first["n"] == 500);
  const auto second = json::parse(client.read_line());
  CHECK(second == first);

  // Same answer as an in-process session with the same seed.
  Session local(cfg);
  CHECK(first == send(local, {{"type", "step"}, {"events", 500}}));

  client.write("{\"type\":\"oops\"}\n");
  CHECK(json::parse(client.read_line()).contains("error"));

  // Subscribed snapshots keep arriving while paused.
  client.write("{\"type\":\"subscribe\",\"cadence_ms\":20}\n");
  CHECK(json::parse(client.read_line())["n"] == 500);
  for (int i = 0; i < 3; ++i) {
    const auto line = client.read_line(2000);
    REQUIRE_FALSE(line.empty());
    CHECK(json::parse(line)["n"] == 500);
  }

  // Resumed, the event clock runs on its own.
  client.write("{\"type\":\"set_rate\",\"events_per_second\":20000}\n{\"type\":\"resume\"}\n");
  std::uint64_t n = 0;
  for (int i = 0; i < 200 && n <= 500; ++i) {
    const auto line = client.read_line(2000);
    REQUIRE_FALSE(line.empty());
    n = json::parse(line)["n"].get<std::uint64_t>();
  }
  CHECK(n > 500);

  // Connections are independent.
  Client other(port);
  REQUIRE(other.connected());
  other.write("{\"type\":\"query\"}\n");
  CHECK(json::parse(other.read_line())["n"] == 0);

  server.stop();
  server.stop();
}

TEST_CASE("busy port is reported") {
  Server a(paused_config());
  const auto port = a.start(0);
  Server b(paused_config());
  CHECK_THROWS_AS(b.start(port), std::runtime_error);
}
