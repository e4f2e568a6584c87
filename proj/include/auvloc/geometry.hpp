#pragma once

#include <cmath>
#include <numbers>

namespace auvloc {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle to [-pi, pi).
inline double wrap_angle(double angle) {
  // std::remainder is exact and lands in [-pi, pi]; fold the closed end.
  const double wrapped = std::remainder(angle, kTwoPi);
  return wrapped == kPi ? -kPi : wrapped;
}

/// Smallest signed difference a - b, wrapped to [-pi, pi).
inline double angle_diff(double a, double b) {
  return wrap_angle(a - b);
}

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// Planar vehicle state; heading is measured from the map x-axis,
/// kept in [-pi, pi).
struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
};

/// Axis-aligned rectangle given by its two corner extremes.
struct Rect {
  Vec2 min;
  Vec2 max;

  double width() const { return max.x - min.x; }
  double height() const { return max.y - min.y; }

  bool contains(double px, double py) const {
    return px >= min.x && px <= max.x && py >= min.y && py <= max.y;
  }
};

/// Euclidean distance from a point to the closest point of a rectangle
/// (zero when the point is inside).
inline double distance_to_rect(double px, double py, const Rect& rect) {
  const double dx = std::max({rect.min.x - px, 0.0, px - rect.max.x});
  const double dy = std::max({rect.min.y - py, 0.0, py - rect.max.y});
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace auvloc
