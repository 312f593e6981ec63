#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "ebsim/polarizer.hpp"
#include "ebsim/random_stream.hpp"
#include "ebsim/unit_vector.hpp"

namespace ebsim {

enum class OutputMode { deterministic, probabilistic };

std::string_view to_string(OutputMode mode);
/// Throws std::invalid_argument on an unknown name.
OutputMode output_mode_from_string(std::string_view name);

/// The single particle in flight. Its clock hand encodes the phase.
struct Messenger {
  UnitVector2 clock;
  int port{0};
  std::uint64_t id{0};
};

/// Amplitudes b₀…b₅ of two chained Mach-Zehnder interferometers for a
/// photon entering mode 0, with probabilities |b_j|².
struct QuantumReference {
  std::array<std::complex<double>, 6> b;
  std::array<double, 6> probs;
};

/// Each beam splitter applies (1/√2)[[1, i], [i, 1]]; the phase shifters
/// multiply modes 0/1 by e^{iφ}. Phases in radians.
QuantumReference quantum_amplitudes(const std::array<double, 4>& phases);

struct BeamSplitterParams {
  /// Memory of the per-port intensity estimates, about 1/(1-γ) events.
  double gamma{0.997};
  /// Learning parameter of the output-stage DLM. Outputs rarer than
  /// roughly theta_min(alpha)² are never emitted in deterministic mode.
  double alpha{0.999};
};

/// Event-based beam splitter built from two learning stages.
///
/// The input stage keeps an exponentially weighted estimate w of how often
/// each input port is used plus the last clock seen on each port. Until
/// 1/(1-γ) messengers have arrived w is the plain running average, so the
/// initial w = (1/2, 1/2) is forgotten after the first event. From
/// these it forms amplitudes a_k = √w_k·e^{iϕ_k} and applies the beam
/// splitter matrix. The output stage turns (|b₀|, |b₁|) into a port either
/// with an internal DLM (deterministic) or a weighted coin (probabilistic).
/// The outgoing clock is the phase of the chosen amplitude.
class BeamSplitterNode {
 public:
  BeamSplitterNode(const BeamSplitterParams& params, const UnitVector2& initial_dlm_vector,
                   OutputMode mode = OutputMode::deterministic);

  /// Consumes one uniform from `rng` only in probabilistic mode.
  Messenger process(const Messenger& msg, RandomStream& rng);

  void set_mode(OutputMode mode) { mode_ = mode; }
  OutputMode mode() const { return mode_; }
  const std::array<double, 2>& weights() const { return w_; }
  const std::array<UnitVector2, 2>& stored_messages() const { return stored_; }
  const DlmState& output_dlm() const { return dlm_; }
  double gamma() const { return gamma_; }

 private:
  std::array<double, 2> w_{0.5, 0.5};
  std::uint64_t seen_{0};
  std::array<UnitVector2, 2> stored_{};
  DlmState dlm_;
  double gamma_;
  OutputMode mode_;
};

struct PhaseShifterNode {
  double phi{0.0};
};

/// Rotates the clock hand by the node's phase.
Messenger phase_shift(const Messenger& msg, const PhaseShifterNode& node);

enum class NodeKind { source, beam_splitter, phase_shifter, detector };

/// Destination of an output line: node index and its input port. A node
/// index of -1 marks the end of the line.
struct Link {
  int node{-1};
  int port{0};
};

struct TopologyNode {
  NodeKind kind;
  /// Index into the beam splitter, phase shifter or detector list.
  int index;
  /// Beam splitters use both outputs; everything else uses out[0].
  std::array<Link, 2> out;
};

/// Directed acyclic network: one source, beam splitters, phase shifters and
/// non-absorbing detector taps. Mirrors are plain links.
struct NetworkTopology {
  std::vector<TopologyNode> nodes;
  int source{0};
  std::vector<PhaseShifterNode> phase_shifters;
  int beam_splitter_count{0};
  int detector_count{0};
};

/// Source → BS → {φ₀ | φ₁} → BS → {φ₂ | φ₃} → BS with detector taps N₀,N₁
/// after the first splitter, N₂,N₃ after the second and N₄,N₅ at the exits.
NetworkTopology build_two_mzi(const std::array<double, 4>& phases);

/// First interferometer only: exits counted by N₂,N₃.
NetworkTopology build_single_mzi(double phi0, double phi1);

struct NetworkCounters {
  std::uint64_t emitted{0};
  std::array<std::uint64_t, 6> detector_counts{};

  double ratio(std::size_t j) const {
    return emitted == 0 ? 0.0 : static_cast<double>(detector_counts[j]) / static_cast<double>(emitted);
  }
};

/// Live network simulation. Messengers are processed strictly one at a
/// time. Controls change phases or mode between events without touching
/// learned state; reset_counters keeps the learned state, reset_all does not.
class Interferometer {
 public:
  Interferometer(NetworkTopology topology, OutputMode mode, std::uint64_t seed, BeamSplitterParams params = {});

  /// Sends one messenger from the source to an exit.
  void emit_one();
  void run(std::uint64_t events);

  /// Throws std::out_of_range for an index outside the phase shifters.
  void set_phase(std::size_t index, double phi);
  void set_mode(OutputMode mode);
  void reset_counters();
  void reset_all();

  const NetworkCounters& counters() const { return counters_; }
  OutputMode mode() const { return mode_; }
  std::vector<double> phases() const;
  const NetworkTopology& topology() const { return topology_; }
  const std::vector<BeamSplitterNode>& beam_splitters() const { return splitters_; }
  /// Quantum reference for the current phases (missing ones read as 0).
  QuantumReference quantum_reference() const;

 private:
  void build_nodes();

  NetworkTopology topology_;
  OutputMode mode_;
  std::uint64_t seed_;
  BeamSplitterParams params_;
  RandomStream rng_;
  std::vector<BeamSplitterNode> splitters_;
  NetworkCounters counters_;
  std::uint64_t next_id_{0};
};

/// Runs N messengers through a fresh network.
NetworkCounters run_network(const NetworkTopology& topology, std::uint64_t events, OutputMode mode,
                            std::uint64_t seed, const BeamSplitterParams& params = {});

/// Updates a phase in a topology description. Throws std::out_of_range.
NetworkTopology set_phase_live(NetworkTopology topology, std::size_t index, double phi);

/// Runs `events` more messengers and writes
/// event_index,N0..N5,p0_qm..p5_qm every `sample_every` events (and after
/// the last one).
void write_network_csv(std::ostream& out, Interferometer& sim, std::uint64_t events, std::uint64_t sample_every);

}  // namespace ebsim
