#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ebsim {

/// A finite 0/1 event pattern, read as one period of a periodic sequence.
class BitSequence {
 public:
  BitSequence() = default;
  explicit BitSequence(std::vector<std::uint8_t> bits);

  /// Parses a string of '0'/'1'. Throws std::invalid_argument otherwise.
  static BitSequence parse(std::string_view text);

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  std::size_t ones() const;
  double density() const;
  int operator[](std::size_t i) const { return bits_[i]; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  BitSequence rotated(std::size_t shift) const;
  std::string to_string() const;

  bool operator==(const BitSequence&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// Representative of a necklace: take the lexicographically smallest
/// rotation and move its leading zeros to the end, so the result starts
/// with 1 and ends with the longest zero run (e.g. 00100101 -> 10010100).
BitSequence canonical_rotation(const BitSequence& seq);

/// True when `a` is a cyclic rotation of `b`.
bool same_necklace(const BitSequence& a, const BitSequence& b);

/// x² ← α²x² + (1−α²)Θ. Throws std::domain_error outside 0 ≤ x² ≤ 1,
/// 0 < α < 1, Θ ∈ {0,1}.
double circle_map_step(double x_sq, int theta_bit, double alpha);

/// Start point (1−α²)/(1−α^{2K+2}) of the periodic pattern of K zeros
/// followed by a single one.
double k_sequence_fixed_point(std::uint64_t zeros, double alpha);

struct StationaryOrbit {
  BitSequence sequence;
  double alpha;
  /// fixed_points[k] is x₂² just before bit k of the period is emitted.
  std::vector<double> fixed_points;
  double mean;
  double variance;
};

/// The unique periodic orbit of the circle map driven by `seq` repeated.
/// Throws std::logic_error if the cycle fails to close within 1e-12.
StationaryOrbit orbit_fixed_points(const BitSequence& seq, double alpha);

/// Δ² from the orbit points: mean of x⁴ minus the squared mean.
double orbit_variance_direct(const StationaryOrbit& orbit);

/// Δ² from the closed double sum over pairs of ones (no orbit needed).
double orbit_variance_double_sum(const BitSequence& seq, double alpha);

/// Δ² computed both ways; throws std::logic_error if they differ by more
/// than 1e-12.
double orbit_variance(const BitSequence& seq, double alpha);

/// Smallest angle a DLM can represent: arctan√((1−α)/(1+α)).
double theta_min(double alpha);

/// Right-hand side of the Θ=1 continuation test from internal state x₂ = z.
double continuation_bound(double z, double alpha);

/// True when a DLM at x = (√(1−z²), z) emits Θ=1 for input angle θ.
bool continuation_criterion(double z, double alpha, double theta);

/// f(α,K): positive when a DLM repeats K zeros followed by a one.
double repetition_margin(double alpha, std::uint64_t zeros);

/// Root α* of f(α,K) = 0 by bisection to 1e-6. Throws
/// std::invalid_argument for K < 2.
double repetition_threshold(std::uint64_t zeros);

struct DeltaSteps {
  double delta0;
  double delta1;
};

/// Linearised angle steps of the two rule families near the stationary
/// state. Throws std::domain_error unless 0 < θ < π/2.
DeltaSteps delta_steps(double theta, double alpha);

struct LatticeConfig {
  BitSequence occupation;
  std::uint64_t p;
  std::uint64_t q;
};

/// Hubbard's generalised Wigner lattice for density p/q: particle i at site
/// ⌊i·q/p⌋, reduced to lowest terms and canonicalised. Throws
/// std::invalid_argument unless 1 ≤ p < q.
LatticeConfig wigner_ground_state(std::uint64_t p, std::uint64_t q);

/// H = Σ_j Σ_{i=0}^{q−2} α^{2i} n_j n_{j+i+1} over one period with cyclic
/// indices. This is the pair sum that enters Δ², so Δ² grows with H at fixed
/// density.
double lattice_energy(const BitSequence& occupation, double alpha);

/// Exhaustive search over necklaces of length q with p ones for the smallest
/// orbit variance. Ties keep the first in lexicographic order of canonical
/// form. Throws std::invalid_argument unless 0 ≤ p ≤ q and 1 ≤ q ≤ 22.
BitSequence brute_force_min_variance(std::uint64_t p, std::uint64_t q, double alpha);

/// Runs a DLM from a seeded random direction at fixed input θ and returns
/// the canonical period of its output once the state recurs (x₂² and signs
/// repeating at 1e-10). Empty when no period ≤ max_period shows up.
std::optional<BitSequence> extract_stationary_sequence(double theta, double alpha, std::uint64_t warmup,
                                                       std::uint64_t max_period, std::uint64_t seed);

}  // namespace ebsim
