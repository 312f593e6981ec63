#include "ebsim/polarizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ebsim {
namespace {

double checked_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie in (0,1), got " + std::to_string(alpha));
  }
  return alpha;
}

double signed_root(double sign_source, double sq) {
  const double r = std::sqrt(std::clamp(sq, 0.0, 1.0));
  return std::signbit(sign_source) ? -r : r;
}

}  // namespace

DlmState::DlmState(UnitVector2 x, double alpha) : x(x), alpha(checked_alpha(alpha)) {}

std::array<DlmCandidate, 4> dlm_candidates(const DlmState& state) {
  const double a = state.alpha;
  const double a2 = a * a;
  const auto [x1, x2] = state.x;
  const double r1 = std::sqrt(std::max(0.0, 1.0 + a2 * (x1 * x1 - 1.0)));
  const double r2 = std::sqrt(std::max(0.0, 1.0 + a2 * (x2 * x2 - 1.0)));
  return {{
      {{+r1, a * x2}, 0},
      {{-r1, a * x2}, 0},
      {{a * x1, +r2}, 1},
      {{a * x1, -r2}, 1},
  }};
}

std::pair<DlmState, OutputEvent> dlm_step(const DlmState& state, const UnitVector2& y) {
  const auto candidates = dlm_candidates(state);
  std::size_t best = 0;
  double best_cost = -candidates[0].x.dot(y);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double cost = -candidates[i].x.dot(y);
    if (cost < best_cost) {
      best_cost = cost;
      best = i;
    }
  }
  DlmState next = state;
  next.x = candidates[best].x.normalized();
  return {next, OutputEvent::from_bit(candidates[best].theta_bit)};
}

std::pair<DlmState, OutputEvent> modified_dlm_step(const DlmState& state, const UnitVector2& y) {
  const double a2 = state.alpha * state.alpha;
  const double x2_sq = state.x.s * state.x.s;
  const double y2_sq = y.s * y.s;
  // sign(0) counts as +1.
  const int bit = (x2_sq - y2_sq) < 0.0 ? 1 : 0;
  const double next_sq = a2 * x2_sq + (1.0 - a2) * bit;
  DlmState next = state;
  next.x = UnitVector2{signed_root(state.x.c, 1.0 - next_sq), signed_root(state.x.s, next_sq)}.normalized();
  return {next, OutputEvent::from_bit(bit)};
}

OutputEvent bernoulli_step(double theta, RandomStream& rng) {
  const double c = std::cos(wrap_angle(theta));
  return OutputEvent::from_bit(rng.uniform() < c * c ? 0 : 1);
}

std::string_view to_string(ProcessorKind kind) {
  switch (kind) {
    case ProcessorKind::bernoulli:
      return "bernoulli";
    case ProcessorKind::dlm:
      return "dlm";
    case ProcessorKind::modified:
      return "modified";
  }
  return "?";
}

ProcessorKind processor_kind_from_string(std::string_view name) {
  if (name == "bernoulli") return ProcessorKind::bernoulli;
  if (name == "dlm") return ProcessorKind::dlm;
  if (name == "modified") return ProcessorKind::modified;
  throw std::invalid_argument("unknown processor kind '" + std::string(name) + "'");
}

Processor::Processor(ProcessorKind kind, double alpha, std::uint64_t seed)
    : kind_(kind),
      rng_(seed),
      state_(UnitVector2{}, kind == ProcessorKind::bernoulli ? 0.5 : alpha) {
  if (kind_ != ProcessorKind::bernoulli) {
    state_.x = UnitVector2::from_angle(rng_.uniform_angle());
  }
}

OutputEvent Processor::step(const UnitVector2& y) {
  switch (kind_) {
    case ProcessorKind::bernoulli:
      return OutputEvent::from_bit(rng_.uniform() < y.c * y.c ? 0 : 1);
    case ProcessorKind::dlm: {
      auto [next, ev] = dlm_step(state_, y);
      state_ = next;
      return ev;
    }
    case ProcessorKind::modified: {
      auto [next, ev] = modified_dlm_step(state_, y);
      state_ = next;
      return ev;
    }
  }
  return {};
}

PolarizerRun run_polarizer(const PolarizerRunConfig& config) {
  if (config.n == 0) {
    throw std::invalid_argument("event count must be at least 1");
  }
  Processor proc(config.kind, config.alpha, config.seed);
  const UnitVector2 y = UnitVector2::from_angle(config.theta);
  for (std::uint64_t i = 0; i < config.warmup; ++i) {
    proc.step(y);
  }
  PolarizerRun run;
  if (config.keep_events) {
    run.events.reserve(config.n);
  }
  for (std::uint64_t i = 0; i < config.n; ++i) {
    const OutputEvent ev = proc.step(y);
    if (ev.channel == Channel::S) {
      ++run.count_s;
    } else {
      ++run.count_c;
    }
    if (config.keep_events) {
      run.events.push_back(static_cast<std::uint8_t>(ev.theta_bit));
    }
  }
  run.theta_estimate = std::asin(std::sqrt(static_cast<double>(run.count_s) / static_cast<double>(config.n)));
  return run;
}

}  // namespace ebsim
