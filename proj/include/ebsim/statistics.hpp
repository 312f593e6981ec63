#pragma once

#include <cstdint>
#include <functional>

namespace ebsim {

/// N independent binary events with success probability p.
struct BinomialModel {
  std::uint64_t n_trials;
  double p;

  /// Throws std::invalid_argument unless N ≥ 1 and 0 ≤ p ≤ 1.
  BinomialModel(std::uint64_t n_trials, double p);
};

/// log P(n | N, p) via lgamma. Returns -infinity when the event is
/// impossible (p = 0 with n > 0, or p = 1 with n < N).
double log_binomial_pmf(std::uint64_t n, const BinomialModel& model);

/// Per-event log-likelihood ratio (1/N) ln[P(n|θ+ε,N) / P(n|θ,N)] for
/// p(θ) = cos²θ, evaluated exactly. Throws std::domain_error when p(θ) or
/// p(θ+ε) is 0 or 1.
double likelihood_ratio_expansion(double theta, double epsilon, std::uint64_t n, std::uint64_t n_trials);

/// Second-order form ±ε² (∂p/∂θ)² / (2p(1−p)). The sign is + when the data
/// favour θ+ε over θ and − otherwise.
double likelihood_ratio_quadratic(double theta, double epsilon, std::uint64_t n, std::uint64_t n_trials);

using ProbabilityFn = std::function<double(double)>;

/// I_F = (∂p/∂θ)² / (p(1−p)), derivative from a central difference with
/// step 1e-6 and one Richardson extrapolation. Throws std::domain_error
/// unless 0 < p(θ) < 1.
double fisher_information(const ProbabilityFn& p, double theta);

struct EncodingCapacity {
  std::uint64_t n_trials;
  double confidence_sigma;
  /// N / (2·c·σ) with σ² = Np(1−p).
  double m_d;
  /// √N / (2·c): the θ-independent quote (√N/6 at c = 3).
  double flat_estimate;
};

/// Throws std::domain_error for p ∉ (0,1) and std::invalid_argument for
/// N = 0 or a non-positive confidence.
EncodingCapacity distinguishable_messages(std::uint64_t n_trials, double confidence_sigma, double p);

/// A learning machine distinguishes N+1 densities from N events.
inline std::uint64_t dlm_distinguishable_messages(std::uint64_t n_trials) { return n_trials + 1; }

struct CramerRaoSides {
  double var_times_fisher;
  double f_prime_sq;
};

/// Both sides of Var(x)·I_F ≥ (∂f/∂θ)² for x = ±1 events with
/// p(+1|θ) = cos²θ, f = ⟨x⟩ = cos 2θ. Each side is evaluated from its own
/// definition. Throws std::domain_error when p(θ) ∈ {0,1}.
CramerRaoSides cramer_rao_identity(double theta);

}  // namespace ebsim
