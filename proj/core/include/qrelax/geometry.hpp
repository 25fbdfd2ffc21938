#pragma once

#include <cmath>
#include <numbers>

namespace qrelax {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct CartesianPoint {
  double x = 0.0;
  double y = 0.0;
};

struct PolarPoint {
  double eta = 0.0;  // radial coordinate, >= 0
  double phi = 0.0;  // azimuth in [0, 2*pi)
};

inline PolarPoint to_polar(const CartesianPoint& q) {
  double phi = std::atan2(q.y, q.x);
  if (phi < 0.0) phi += kTwoPi;
  if (phi >= kTwoPi) phi = 0.0;
  return {std::hypot(q.x, q.y), phi};
}

inline CartesianPoint to_cartesian(const PolarPoint& p) {
  return {p.eta * std::cos(p.phi), p.eta * std::sin(p.phi)};
}

// Reduce an angle to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::remainder(a, kTwoPi);
  if (a <= -kPi) a += kTwoPi;
  return a;
}

// Reduce an angle to [0, 2*pi).
inline double wrap_positive(double a) {
  a -= kTwoPi * std::floor(a / kTwoPi);
  if (a >= kTwoPi) a -= kTwoPi;
  if (a < 0.0) a = 0.0;
  return a;
}

// Reduce an axis direction to [0, pi).
inline double wrap_axis(double a) {
  a -= kPi * std::floor(a / kPi);
  if (a >= kPi) a -= kPi;
  if (a < 0.0) a = 0.0;
  return a;
}

}  // namespace qrelax
