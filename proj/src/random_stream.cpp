#include "ebsim/random_stream.hpp"

#include <numbers>

namespace ebsim {

double RandomStream::uniform() {
  for (;;) {
    // 53 high bits -> [0, 1) with uniform spacing 2^-53; reject the 0.
    const std::uint64_t bits = engine_() >> 11;
    if (bits != 0) {
      return static_cast<double>(bits) * 0x1.0p-53;
    }
  }
}

double RandomStream::uniform_angle() {
  return 2.0 * std::numbers::pi * uniform();
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace ebsim
