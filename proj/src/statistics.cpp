#include "ebsim/statistics.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ebsim {
namespace {

constexpr double kDerivativeStep = 1e-6;

double cos_sq(double theta) {
  const double c = std::cos(theta);
  return c * c;
}

void require_open_unit(double p, const char* what) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error(std::string(what) + ": probability must lie in (0,1)");
  }
}

double derivative(const ProbabilityFn& f, double x) {
  const auto central = [&](double h) { return (f(x + h) - f(x - h)) / (2.0 * h); };
  const double coarse = central(kDerivativeStep);
  const double fine = central(kDerivativeStep / 2.0);
  return (4.0 * fine - coarse) / 3.0;
}

}  // namespace

BinomialModel::BinomialModel(std::uint64_t n_trials, double p) : n_trials(n_trials), p(p) {
  if (n_trials == 0) {
    throw std::invalid_argument("binomial model needs N >= 1");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("binomial probability must lie in [0,1]");
  }
}

double log_binomial_pmf(std::uint64_t n, const BinomialModel& model) {
  const std::uint64_t big_n = model.n_trials;
  if (n > big_n) {
    throw std::invalid_argument("n exceeds N");
  }
  const double nd = static_cast<double>(n);
  const double rest = static_cast<double>(big_n - n);
  // Handle the boundaries explicitly so 0·log 0 never appears.
  double log_terms = 0.0;
  if (n > 0) {
    if (model.p == 0.0) return -std::numeric_limits<double>::infinity();
    log_terms += nd * std::log(model.p);
  }
  if (big_n > n) {
    if (model.p == 1.0) return -std::numeric_limits<double>::infinity();
    log_terms += rest * std::log1p(-model.p);
  }
  const double log_choose =
      std::lgamma(static_cast<double>(big_n) + 1.0) - std::lgamma(nd + 1.0) - std::lgamma(rest + 1.0);
  return log_choose + log_terms;
}

double likelihood_ratio_expansion(double theta, double epsilon, std::uint64_t n, std::uint64_t n_trials) {
  if (n_trials == 0 || n > n_trials) {
    throw std::invalid_argument("need 0 <= n <= N and N >= 1");
  }
  const double p0 = cos_sq(theta);
  const double p1 = cos_sq(theta + epsilon);
  require_open_unit(p0, "likelihood ratio at theta");
  require_open_unit(p1, "likelihood ratio at theta+epsilon");
  const double frac = static_cast<double>(n) / static_cast<double>(n_trials);
  return frac * std::log(p1 / p0) + (1.0 - frac) * std::log((1.0 - p1) / (1.0 - p0));
}

double likelihood_ratio_quadratic(double theta, double epsilon, std::uint64_t n, std::uint64_t n_trials) {
  const double exact = likelihood_ratio_expansion(theta, epsilon, n, n_trials);
  const double p = cos_sq(theta);
  const double dp = -std::sin(2.0 * theta);
  const double magnitude = epsilon * epsilon * dp * dp / (2.0 * p * (1.0 - p));
  return exact > 0.0 ? magnitude : -magnitude;
}

double fisher_information(const ProbabilityFn& p, double theta) {
  const double value = p(theta);
  require_open_unit(value, "fisher information");
  const double dp = derivative(p, theta);
  return dp * dp / (value * (1.0 - value));
}

EncodingCapacity distinguishable_messages(std::uint64_t n_trials, double confidence_sigma, double p) {
  if (n_trials == 0) {
    throw std::invalid_argument("need N >= 1");
  }
  if (!(confidence_sigma > 0.0)) {
    throw std::invalid_argument("confidence must be positive");
  }
  require_open_unit(p, "distinguishable messages");
  const double n = static_cast<double>(n_trials);
  const double sigma = std::sqrt(n * p * (1.0 - p));
  return {n_trials, confidence_sigma, n / (2.0 * confidence_sigma * sigma),
          std::sqrt(n) / (2.0 * confidence_sigma)};
}

CramerRaoSides cramer_rao_identity(double theta) {
  const double p_plus = cos_sq(theta);
  require_open_unit(p_plus, "cramer-rao");
  const double dp_plus = -std::sin(2.0 * theta);
  // Outcomes x = +1 and x = -1 with their probabilities and derivatives.
  const std::array<double, 2> xs{+1.0, -1.0};
  const std::array<double, 2> ps{p_plus, 1.0 - p_plus};
  const std::array<double, 2> dps{dp_plus, -dp_plus};
  double f = 0.0;
  for (std::size_t i = 0; i < 2; ++i) f += xs[i] * ps[i];
  double var = 0.0;
  double fisher = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    var += (xs[i] - f) * (xs[i] - f) * ps[i];
    fisher += dps[i] * dps[i] / ps[i];
  }
  const double f_prime = -2.0 * std::sin(2.0 * theta);
  return {var * fisher, f_prime * f_prime};
}

}  // namespace ebsim
