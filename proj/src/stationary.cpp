#include "ebsim/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "ebsim/polarizer.hpp"
#include "ebsim/random_stream.hpp"

namespace ebsim {
namespace {

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::domain_error("alpha must lie in (0,1)");
  }
}

// Index of the lexicographically smallest rotation (Booth's algorithm).
std::size_t least_rotation(const std::vector<std::uint8_t>& s) {
  const std::size_t n = s.size();
  std::vector<long> fail(2 * n, -1);
  std::size_t k = 0;
  for (std::size_t j = 1; j < 2 * n; ++j) {
    const std::uint8_t sj = s[j % n];
    long i = fail[j - k - 1];
    while (i != -1 && sj != s[(k + static_cast<std::size_t>(i) + 1) % n]) {
      if (sj < s[(k + static_cast<std::size_t>(i) + 1) % n]) {
        k = j - static_cast<std::size_t>(i) - 1;
      }
      i = fail[static_cast<std::size_t>(i)];
    }
    if (i == -1 && sj != s[(k + static_cast<std::size_t>(i) + 1) % n]) {
      if (sj < s[(k + static_cast<std::size_t>(i) + 1) % n]) {
        k = j;
      }
      fail[j - k] = -1;
    } else {
      fail[j - k] = i + 1;
    }
  }
  return k;
}

}  // namespace

BitSequence::BitSequence(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto b : bits_) {
    if (b > 1) {
      throw std::invalid_argument("bit sequence entries must be 0 or 1");
    }
  }
}

BitSequence BitSequence::parse(std::string_view text) {
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (char ch : text) {
    if (ch != '0' && ch != '1') {
      throw std::invalid_argument("bit sequence must contain only 0 and 1");
    }
    bits.push_back(static_cast<std::uint8_t>(ch - '0'));
  }
  return BitSequence(std::move(bits));
}

std::size_t BitSequence::ones() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

double BitSequence::density() const {
  return empty() ? 0.0 : static_cast<double>(ones()) / static_cast<double>(size());
}

BitSequence BitSequence::rotated(std::size_t shift) const {
  if (empty()) return *this;
  std::vector<std::uint8_t> out(bits_);
  std::rotate(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(shift % size()), out.end());
  return BitSequence(std::move(out));
}

std::string BitSequence::to_string() const {
  std::string out;
  out.reserve(size());
  for (auto b : bits_) out.push_back(static_cast<char>('0' + b));
  return out;
}

BitSequence canonical_rotation(const BitSequence& seq) {
  if (seq.empty()) return seq;
  BitSequence least = seq.rotated(least_rotation(seq.bits()));
  const auto& bits = least.bits();
  const auto first_one = std::find(bits.begin(), bits.end(), std::uint8_t{1});
  if (first_one == bits.end()) return least;
  return least.rotated(static_cast<std::size_t>(first_one - bits.begin()));
}

bool same_necklace(const BitSequence& a, const BitSequence& b) {
  return a.size() == b.size() && canonical_rotation(a) == canonical_rotation(b);
}

double circle_map_step(double x_sq, int theta_bit, double alpha) {
  if (!(x_sq >= 0.0 && x_sq <= 1.0)) {
    throw std::domain_error("circle map state must lie in [0,1]");
  }
  if (theta_bit != 0 && theta_bit != 1) {
    throw std::domain_error("circle map input must be 0 or 1");
  }
  require_alpha(alpha);
  const double a2 = alpha * alpha;
  return a2 * x_sq + (1.0 - a2) * theta_bit;
}

double k_sequence_fixed_point(std::uint64_t zeros, double alpha) {
  require_alpha(alpha);
  const double a2 = alpha * alpha;
  return (1.0 - a2) / (1.0 - std::pow(a2, static_cast<double>(zeros + 1)));
}

StationaryOrbit orbit_fixed_points(const BitSequence& seq, double alpha) {
  if (seq.empty()) {
    throw std::invalid_argument("orbit needs a non-empty sequence");
  }
  require_alpha(alpha);
  const std::size_t q = seq.size();
  const double a2 = alpha * alpha;

  // Closed form of the start point: (1−α²)/(1−α^{2q}) Σ_j α^{2(q−j)} Θ_j.
  double weighted = 0.0;
  double w = 1.0;
  for (std::size_t j = q; j-- > 0;) {
    weighted += w * seq[j];
    w *= a2;
  }
  const double start = (1.0 - a2) / (1.0 - std::pow(a2, static_cast<double>(q))) * weighted;

  StationaryOrbit orbit{seq, alpha, {}, 0.0, 0.0};
  orbit.fixed_points.reserve(q);
  double x = start;
  for (std::size_t k = 0; k < q; ++k) {
    orbit.fixed_points.push_back(x);
    x = circle_map_step(std::clamp(x, 0.0, 1.0), seq[k], alpha);
  }
  if (std::abs(x - start) > 1e-12) {
    throw std::logic_error("periodic orbit failed to close");
  }
  const double qd = static_cast<double>(q);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double v : orbit.fixed_points) {
    sum += v;
    sum_sq += v * v;
  }
  orbit.mean = sum / qd;
  orbit.variance = sum_sq / qd - orbit.mean * orbit.mean;
  return orbit;
}

double orbit_variance_direct(const StationaryOrbit& orbit) {
  const double q = static_cast<double>(orbit.fixed_points.size());
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double v : orbit.fixed_points) {
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / q;
  return sum_sq / q - mean * mean;
}

double orbit_variance_double_sum(const BitSequence& seq, double alpha) {
  if (seq.empty()) {
    throw std::invalid_argument("variance needs a non-empty sequence");
  }
  require_alpha(alpha);
  const std::size_t q = seq.size();
  const double qd = static_cast<double>(q);
  const double a2 = alpha * alpha;
  const double a2q = std::pow(a2, qd);
  const double density = seq.density();
  const double pair_sum = lattice_energy(seq, alpha);
  const double fourth_moment =
      (1.0 - a2) / (1.0 + a2) * ((1.0 + a2q) / (1.0 - a2q) * density + 2.0 * a2 / (1.0 - a2q) * pair_sum / qd);
  return fourth_moment - density * density;
}

double orbit_variance(const BitSequence& seq, double alpha) {
  const double direct = orbit_variance_direct(orbit_fixed_points(seq, alpha));
  const double paired = orbit_variance_double_sum(seq, alpha);
  if (std::abs(direct - paired) > 1e-12) {
    throw std::logic_error("variance routes disagree for " + seq.to_string());
  }
  return direct;
}

double theta_min(double alpha) {
  require_alpha(alpha);
  return std::atan(std::sqrt((1.0 - alpha) / (1.0 + alpha)));
}

double continuation_bound(double z, double alpha) {
  if (!(z >= 0.0 && z <= 1.0)) {
    throw std::domain_error("z must lie in [0,1]");
  }
  require_alpha(alpha);
  const double a2 = alpha * alpha;
  const double num = alpha * z + std::sqrt(1.0 - a2 + a2 * z * z);
  const double den = std::sqrt(1.0 - a2 * z * z) + alpha * std::sqrt(1.0 - z * z);
  return num / den;
}

bool continuation_criterion(double z, double alpha, double theta) {
  return std::tan(theta) > continuation_bound(z, alpha);
}

double repetition_margin(double alpha, std::uint64_t zeros) {
  require_alpha(alpha);
  const double a2 = alpha * alpha;
  const double k = static_cast<double>(zeros);
  const double z_sq = std::pow(a2, k) * (1.0 - a2) / (1.0 - std::pow(a2, k + 1.0));
  return 1.0 / std::sqrt(k) - continuation_bound(std::sqrt(z_sq), alpha);
}

double repetition_threshold(std::uint64_t zeros) {
  if (zeros < 2) {
    throw std::invalid_argument("repetition threshold needs K >= 2");
  }
  double lo = 0.9;
  double hi = 1.0;
  // Small K cross zero below 0.9; walk the lower end down until f < 0.
  while (repetition_margin(lo, zeros) > 0.0) {
    hi = lo;
    lo /= 2.0;
    if (lo < 1e-9) {
      throw std::logic_error("repetition threshold bracket not found");
    }
  }
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    if (repetition_margin(mid, zeros) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

DeltaSteps delta_steps(double theta, double alpha) {
  if (!(theta > 0.0 && theta < std::numbers::pi / 2.0)) {
    throw std::domain_error("delta steps need 0 < theta < pi/2");
  }
  require_alpha(alpha);
  const double half = (1.0 - alpha * alpha) / 2.0;
  return {-half * std::tan(theta), half / std::tan(theta)};
}

LatticeConfig wigner_ground_state(std::uint64_t p, std::uint64_t q) {
  if (!(p >= 1 && p < q)) {
    throw std::invalid_argument("wigner lattice needs 1 <= p < q");
  }
  const std::uint64_t g = std::gcd(p, q);
  p /= g;
  q /= g;
  std::vector<std::uint8_t> sites(q, 0);
  for (std::uint64_t i = 0; i < p; ++i) {
    sites[(i * q) / p] = 1;
  }
  return {canonical_rotation(BitSequence(std::move(sites))), p, q};
}

double lattice_energy(const BitSequence& occupation, double alpha) {
  require_alpha(alpha);
  const std::size_t q = occupation.size();
  if (q < 2) return 0.0;
  const double a2 = alpha * alpha;
  double energy = 0.0;
  for (std::size_t j = 0; j < q; ++j) {
    if (occupation[j] == 0) continue;
    double v = 1.0;
    for (std::size_t i = 0; i + 2 <= q; ++i) {
      energy += v * occupation[(j + i + 1) % q];
      v *= a2;
    }
  }
  return energy;
}

BitSequence brute_force_min_variance(std::uint64_t p, std::uint64_t q, double alpha) {
  if (q < 1 || q > 22 || p > q) {
    throw std::invalid_argument("brute force needs 0 <= p <= q <= 22");
  }
  require_alpha(alpha);
  std::vector<std::uint8_t> bits(q, 0);
  std::fill(bits.end() - static_cast<std::ptrdiff_t>(p), bits.end(), std::uint8_t{1});
  // bits now holds the lexicographically smallest arrangement; walk all.
  std::optional<BitSequence> best;
  double best_variance = 0.0;
  do {
    if (least_rotation(bits) != 0) continue;  // not a necklace representative
    BitSequence candidate(bits);
    const double v = orbit_variance_direct(orbit_fixed_points(candidate, alpha));
    if (!best || v < best_variance) {
      best = candidate;
      best_variance = v;
    }
  } while (std::next_permutation(bits.begin(), bits.end()));
  return canonical_rotation(*best);
}

std::optional<BitSequence> extract_stationary_sequence(double theta, double alpha, std::uint64_t warmup,
                                                       std::uint64_t max_period, std::uint64_t seed) {
  if (max_period == 0) {
    throw std::invalid_argument("max_period must be positive");
  }
  RandomStream rng(seed);
  DlmState state(UnitVector2::from_angle(rng.uniform_angle()), alpha);
  const UnitVector2 y = UnitVector2::from_angle(theta);
  for (std::uint64_t i = 0; i < warmup; ++i) {
    state = dlm_step(state, y).first;
  }

  struct Sample {
    double x2_sq;
    bool neg_c;
    bool neg_s;
    std::uint8_t bit;
  };
  const std::size_t window = static_cast<std::size_t>(2 * max_period);
  std::vector<Sample> trace;
  trace.reserve(window);
  for (std::size_t i = 0; i < window; ++i) {
    auto [next, ev] = dlm_step(state, y);
    trace.push_back({state.x.s * state.x.s, std::signbit(state.x.c), std::signbit(state.x.s),
                     static_cast<std::uint8_t>(ev.theta_bit)});
    state = next;
  }

  for (std::size_t period = 1; period <= max_period; ++period) {
    bool recurs = true;
    for (std::size_t i = 0; i < max_period && recurs; ++i) {
      const Sample& a = trace[i];
      const Sample& b = trace[i + period];
      recurs = a.bit == b.bit && a.neg_c == b.neg_c && a.neg_s == b.neg_s && std::abs(a.x2_sq - b.x2_sq) < 1e-10;
    }
    if (recurs) {
      std::vector<std::uint8_t> bits;
      bits.reserve(period);
      for (std::size_t i = 0; i < period; ++i) bits.push_back(trace[i].bit);
      return canonical_rotation(BitSequence(std::move(bits)));
    }
  }
  return std::nullopt;
}

}  // namespace ebsim
