#pragma once

#include <cmath>
#include <numbers>

namespace ebsim {

/// A point on the unit circle, stored as a (cos, sin) pair.
///
/// Used for input messages, the internal vector of a learning machine and
/// the clock carried by a messenger. Angles are radians.
struct UnitVector2 {
  double c{1.0};
  double s{0.0};

  static UnitVector2 from_angle(double angle) { return {std::cos(angle), std::sin(angle)}; }

  double angle() const { return std::atan2(s, c); }
  double norm() const { return std::hypot(c, s); }
  double dot(const UnitVector2& other) const { return c * other.c + s * other.s; }

  /// Projects back onto the circle; a zero vector maps to (1, 0).
  UnitVector2 normalized() const {
    const double n = norm();
    if (n == 0.0) {
      return {};
    }
    return {c / n, s / n};
  }

  /// Counter-clockwise rotation by `angle`.
  UnitVector2 rotated(double angle) const {
    const double ca = std::cos(angle);
    const double sa = std::sin(angle);
    return {c * ca - s * sa, c * sa + s * ca};
  }

  bool operator==(const UnitVector2&) const = default;
};

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Reduces an angle to [0, 2π).
inline double wrap_angle(double angle) {
  double r = std::fmod(angle, 2.0 * std::numbers::pi);
  if (r < 0.0) {
    r += 2.0 * std::numbers::pi;
  }
  return r;
}

}  // namespace ebsim
