#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "ebsim/random_stream.hpp"
#include "ebsim/unit_vector.hpp"

namespace ebsim {

/// Output channels of a polarizer. C carries the cos²θ share of the events,
/// S the sin²θ share. A learning machine's Θ=1 decision always maps to S.
enum class Channel : std::uint8_t { C = 0, S = 1 };

struct OutputEvent {
  int theta_bit{0};
  Channel channel{Channel::C};

  static OutputEvent from_bit(int bit) { return {bit, bit != 0 ? Channel::S : Channel::C}; }
  bool operator==(const OutputEvent&) const = default;
};

/// Internal state of a deterministic learning machine (DLM).
struct DlmState {
  UnitVector2 x;
  double alpha;

  /// Throws std::invalid_argument unless 0 < alpha < 1.
  DlmState(UnitVector2 x, double alpha);
};

struct DlmCandidate {
  UnitVector2 x;
  int theta_bit;
};

/// The four candidate internal vectors, in rule order: the two Θ=0 rules
/// (x₁ = ±√(1+α²(x₁²−1)), x₂ = αx₂) then the two Θ=1 rules
/// (x₁ = αx₁, x₂ = ±√(1+α²(x₂²−1))).
std::array<DlmCandidate, 4> dlm_candidates(const DlmState& state);

/// One DLM event: picks the candidate minimising −x·y. Ties keep the
/// earliest rule. The chosen vector is renormalised.
std::pair<DlmState, OutputEvent> dlm_step(const DlmState& state, const UnitVector2& y);

/// One event of the sign-rule machine: Θ̂ = 1 iff x₂² < y₂², then
/// x₂² ← α²x₂² + (1−α²)Θ̂. Equal squares give Θ̂ = 0. Component signs are kept.
std::pair<DlmState, OutputEvent> modified_dlm_step(const DlmState& state, const UnitVector2& y);

/// Memoryless processor: channel C with probability cos²θ. Consumes one
/// uniform from `rng`.
OutputEvent bernoulli_step(double theta, RandomStream& rng);

enum class ProcessorKind { bernoulli, dlm, modified };

std::string_view to_string(ProcessorKind kind);
/// Throws std::invalid_argument on an unknown name.
ProcessorKind processor_kind_from_string(std::string_view name);

/// A polarizer of any kind behind one stepping interface. DLM kinds start
/// from an internal vector whose direction is drawn from the seed.
class Processor {
 public:
  Processor(ProcessorKind kind, double alpha, std::uint64_t seed);

  OutputEvent step(const UnitVector2& y);

  ProcessorKind kind() const { return kind_; }
  const DlmState& state() const { return state_; }

 private:
  ProcessorKind kind_;
  RandomStream rng_;
  DlmState state_;
};

struct PolarizerRunConfig {
  ProcessorKind kind{ProcessorKind::dlm};
  double theta{0.0};
  std::uint64_t n{1000};
  double alpha{0.99};
  std::uint64_t warmup{0};
  std::uint64_t seed{0};
  bool keep_events{false};
};

struct PolarizerRun {
  std::uint64_t count_c{0};
  std::uint64_t count_s{0};
  /// arcsin√(K/N), K = channel-S count in the counted window.
  double theta_estimate{0.0};
  /// Θ bits of the counted window when requested.
  std::vector<std::uint8_t> events;
};

/// Feeds `warmup + n` identical input events at angle `theta`; only the
/// last `n` are counted. Throws std::invalid_argument for n == 0 or an
/// alpha outside (0,1) on a DLM kind.
PolarizerRun run_polarizer(const PolarizerRunConfig& config);

}  // namespace ebsim
