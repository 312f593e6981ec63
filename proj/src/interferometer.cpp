#include "ebsim/interferometer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "ebsim/io.hpp"

namespace ebsim {
namespace {

using cplx = std::complex<double>;

constexpr double kDegenerateAmplitude = 1e-15;

std::array<cplx, 2> beam_splitter_matrix(cplx a0, cplx a1) {
  const double r = 1.0 / std::numbers::sqrt2;
  const cplx i{0.0, 1.0};
  return {r * (a0 + i * a1), r * (i * a0 + a1)};
}

cplx to_complex(const UnitVector2& v) { return {v.c, v.s}; }

}  // namespace

std::string_view to_string(OutputMode mode) {
  return mode == OutputMode::deterministic ? "deterministic" : "probabilistic";
}

OutputMode output_mode_from_string(std::string_view name) {
  if (name == "deterministic") return OutputMode::deterministic;
  if (name == "probabilistic") return OutputMode::probabilistic;
  throw std::invalid_argument("unknown mode '" + std::string(name) + "'");
}

QuantumReference quantum_amplitudes(const std::array<double, 4>& phases) {
  QuantumReference ref{};
  const auto first = beam_splitter_matrix(1.0, 0.0);
  const auto second = beam_splitter_matrix(std::polar(1.0, phases[0]) * first[0], std::polar(1.0, phases[1]) * first[1]);
  const auto third = beam_splitter_matrix(std::polar(1.0, phases[2]) * second[0], std::polar(1.0, phases[3]) * second[1]);
  ref.b = {first[0], first[1], second[0], second[1], third[0], third[1]};
  for (std::size_t j = 0; j < 6; ++j) {
    ref.probs[j] = std::norm(ref.b[j]);
  }
  return ref;
}

BeamSplitterNode::BeamSplitterNode(const BeamSplitterParams& params, const UnitVector2& initial_dlm_vector,
                                   OutputMode mode)
    : dlm_(initial_dlm_vector, params.alpha), gamma_(params.gamma), mode_(mode) {
  if (!(gamma_ > 0.0 && gamma_ < 1.0)) {
    throw std::invalid_argument("gamma must lie in (0,1)");
  }
}

Messenger BeamSplitterNode::process(const Messenger& msg, RandomStream& rng) {
  if (msg.port != 0 && msg.port != 1) {
    throw std::invalid_argument("beam splitter input port must be 0 or 1");
  }
  const auto in = static_cast<std::size_t>(msg.port);
  // Plain running average until the window 1/(1-γ) is filled.
  ++seen_;
  const double g = std::min(gamma_, 1.0 - 1.0 / static_cast<double>(seen_));
  w_[in] = g * w_[in] + (1.0 - g);
  w_[1 - in] = g * w_[1 - in];
  const double total = w_[0] + w_[1];
  w_[0] /= total;
  w_[1] /= total;
  stored_[in] = msg.clock;

  const auto b = beam_splitter_matrix(std::sqrt(w_[0]) * to_complex(stored_[0]),
                                      std::sqrt(w_[1]) * to_complex(stored_[1]));
  const double m0 = std::abs(b[0]);
  const double m1 = std::abs(b[1]);

  int out = 0;
  if (mode_ == OutputMode::deterministic) {
    const UnitVector2 y = UnitVector2{m0, m1}.normalized();
    auto [next, ev] = dlm_step(dlm_, y);
    dlm_ = next;
    out = ev.theta_bit;
  } else {
    out = rng.uniform() < m1 * m1 / (m0 * m0 + m1 * m1) ? 1 : 0;
  }

  Messenger result = msg;
  result.port = out;
  const cplx chosen = b[static_cast<std::size_t>(out)];
  const double mag = std::abs(chosen);
  if (mag >= kDegenerateAmplitude) {
    result.clock = UnitVector2{chosen.real() / mag, chosen.imag() / mag};
  }
  return result;
}

Messenger phase_shift(const Messenger& msg, const PhaseShifterNode& node) {
  Messenger out = msg;
  out.clock = msg.clock.rotated(node.phi).normalized();
  return out;
}

namespace {

struct TopologyBuilder {
  NetworkTopology t;

  int add(NodeKind kind) {
    int index = 0;
    switch (kind) {
      case NodeKind::source:
        index = 0;
        break;
      case NodeKind::beam_splitter:
        index = t.beam_splitter_count++;
        break;
      case NodeKind::phase_shifter:
        index = static_cast<int>(t.phase_shifters.size());
        t.phase_shifters.push_back({});
        break;
      case NodeKind::detector:
        index = t.detector_count++;
        break;
    }
    t.nodes.push_back({kind, index, {}});
    return static_cast<int>(t.nodes.size()) - 1;
  }

  void link(int from, int out_port, int to, int in_port = 0) {
    t.nodes[static_cast<std::size_t>(from)].out[static_cast<std::size_t>(out_port)] = {to, in_port};
  }

  // splitter outputs → detector taps → phase shifters → next splitter.
  void stage(int splitter, int next_splitter) {
    for (int port = 0; port < 2; ++port) {
      const int det = add(NodeKind::detector);
      const int ps = add(NodeKind::phase_shifter);
      link(splitter, port, det);
      link(det, 0, ps);
      link(ps, 0, next_splitter, port);
    }
  }

  void exits(int splitter) {
    for (int port = 0; port < 2; ++port) {
      link(splitter, port, add(NodeKind::detector));
    }
  }
};

}  // namespace

NetworkTopology build_two_mzi(const std::array<double, 4>& phases) {
  TopologyBuilder b;
  b.t.source = b.add(NodeKind::source);
  const int bs0 = b.add(NodeKind::beam_splitter);
  const int bs1 = b.add(NodeKind::beam_splitter);
  const int bs2 = b.add(NodeKind::beam_splitter);
  b.link(b.t.source, 0, bs0, 0);
  b.stage(bs0, bs1);
  b.stage(bs1, bs2);
  b.exits(bs2);
  for (std::size_t j = 0; j < 4; ++j) b.t.phase_shifters[j].phi = wrap_angle(phases[j]);
  return b.t;
}

NetworkTopology build_single_mzi(double phi0, double phi1) {
  TopologyBuilder b;
  b.t.source = b.add(NodeKind::source);
  const int bs0 = b.add(NodeKind::beam_splitter);
  const int bs1 = b.add(NodeKind::beam_splitter);
  b.link(b.t.source, 0, bs0, 0);
  b.stage(bs0, bs1);
  b.exits(bs1);
  b.t.phase_shifters[0].phi = wrap_angle(phi0);
  b.t.phase_shifters[1].phi = wrap_angle(phi1);
  return b.t;
}

Interferometer::Interferometer(NetworkTopology topology, OutputMode mode, std::uint64_t seed,
                               BeamSplitterParams params)
    : topology_(std::move(topology)), mode_(mode), seed_(seed), params_(params), rng_(seed) {
  if (topology_.detector_count > 6) {
    throw std::invalid_argument("at most six detectors are supported");
  }
  build_nodes();
}

void Interferometer::build_nodes() {
  rng_ = RandomStream(seed_);
  splitters_.clear();
  for (int i = 0; i < topology_.beam_splitter_count; ++i) {
    splitters_.emplace_back(params_, UnitVector2::from_angle(rng_.uniform_angle()), mode_);
  }
}

void Interferometer::emit_one() {
  Messenger msg{UnitVector2{1.0, 0.0}, 0, next_id_++};
  ++counters_.emitted;
  Link at = topology_.nodes[static_cast<std::size_t>(topology_.source)].out[0];
  while (at.node >= 0) {
    const TopologyNode& node = topology_.nodes[static_cast<std::size_t>(at.node)];
    msg.port = at.port;
    switch (node.kind) {
      case NodeKind::beam_splitter:
        msg = splitters_[static_cast<std::size_t>(node.index)].process(msg, rng_);
        at = node.out[static_cast<std::size_t>(msg.port)];
        break;
      case NodeKind::phase_shifter:
        msg = phase_shift(msg, topology_.phase_shifters[static_cast<std::size_t>(node.index)]);
        at = node.out[0];
        break;
      case NodeKind::detector:
        ++counters_.detector_counts[static_cast<std::size_t>(node.index)];
        at = node.out[0];
        break;
      case NodeKind::source:
        throw std::logic_error("messenger returned to the source");
    }
  }
}

void Interferometer::run(std::uint64_t events) {
  for (std::uint64_t i = 0; i < events; ++i) emit_one();
}

void Interferometer::set_phase(std::size_t index, double phi) {
  if (index >= topology_.phase_shifters.size()) {
    throw std::out_of_range("phase index " + std::to_string(index) + " out of range");
  }
  topology_.phase_shifters[index].phi = wrap_angle(phi);
}

void Interferometer::set_mode(OutputMode mode) {
  mode_ = mode;
  for (auto& bs : splitters_) bs.set_mode(mode);
}

void Interferometer::reset_counters() { counters_ = {}; }

void Interferometer::reset_all() {
  counters_ = {};
  next_id_ = 0;
  build_nodes();
}

std::vector<double> Interferometer::phases() const {
  std::vector<double> out;
  for (const auto& ps : topology_.phase_shifters) out.push_back(ps.phi);
  return out;
}

QuantumReference Interferometer::quantum_reference() const {
  std::array<double, 4> phases{};
  for (std::size_t j = 0; j < topology_.phase_shifters.size() && j < 4; ++j) {
    phases[j] = topology_.phase_shifters[j].phi;
  }
  return quantum_amplitudes(phases);
}

NetworkCounters run_network(const NetworkTopology& topology, std::uint64_t events, OutputMode mode,
                            std::uint64_t seed, const BeamSplitterParams& params) {
  Interferometer sim(topology, mode, seed, params);
  sim.run(events);
  return sim.counters();
}

NetworkTopology set_phase_live(NetworkTopology topology, std::size_t index, double phi) {
  if (index >= topology.phase_shifters.size()) {
    throw std::out_of_range("phase index " + std::to_string(index) + " out of range");
  }
  topology.phase_shifters[index].phi = wrap_angle(phi);
  return topology;
}

void write_network_csv(std::ostream& out, Interferometer& sim, std::uint64_t events, std::uint64_t sample_every) {
  if (sample_every == 0) {
    throw std::invalid_argument("sample interval must be positive");
  }
  out << "event_index,N0,N1,N2,N3,N4,N5,p0_qm,p1_qm,p2_qm,p3_qm,p4_qm,p5_qm\n";
  const auto row = [&] {
    const auto& c = sim.counters();
    const auto ref = sim.quantum_reference();
    out << c.emitted;
    for (auto n : c.detector_counts) out << ',' << n;
    for (double p : ref.probs) out << ',' << fmt_real(p);
    out << '\n';
  };
  for (std::uint64_t i = 1; i <= events; ++i) {
    sim.emit_one();
    if (i % sample_every == 0 || i == events) row();
  }
}

}  // namespace ebsim
