#pragma once

#include <cstdint>
#include <random>

namespace ebsim {

/// Seeded uniform generator on the open interval (0, 1).
///
/// The conversion from the 64-bit engine output is done by hand so the
/// stream is identical across standard library implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// Next uniform real in (0, 1); never returns 0 or 1.
  double uniform();

  /// Uniform angle in [0, 2π).
  double uniform_angle();

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// Mixes a master seed with a stream index (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace ebsim
