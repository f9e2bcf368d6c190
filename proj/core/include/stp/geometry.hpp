#pragma once

#include <cmath>

namespace stp {

/// Planar vector / point, meters.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }

  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
  double squared_norm() const { return x * x + y * y; }
};

inline Vec2 operator*(double s, const Vec2& v) { return {v.x * s, v.y * s}; }

/// Axis-aligned rectangle, used for world bounds.
struct Rect {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  bool contains(const Vec2& p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
};

/// Planar pose: position plus orientation.
struct Pose2 {
  Vec2 pos;
  double heading = 0.0;
};

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  double r = std::fmod(a + M_PI, 2.0 * M_PI);
  if (r <= 0.0) r += 2.0 * M_PI;
  return r - M_PI;
}

/// Wraps an angle to [0, 2*pi).
inline double wrap_angle_2pi(double a) {
  double r = std::fmod(a, 2.0 * M_PI);
  if (r < 0.0) r += 2.0 * M_PI;
  return r;
}

/// Distance from the origin to the segment [a, b].
inline double segment_distance_to_origin(const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double len2 = d.squared_norm();
  if (len2 <= 0.0) return a.norm();
  double t = -(a.dot(d)) / len2;
  if (t < 0.0) t = 0.0;
  if (t > 1.0) t = 1.0;
  return (a + t * d).norm();
}

}  // namespace stp
