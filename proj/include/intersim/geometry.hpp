#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "intersim/error.hpp"

namespace intersim {

inline constexpr double kEps = 1e-9;
inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }

  double norm_sq() const { return x * x + y * y; }
  double norm() const { return std::sqrt(norm_sq()); }

  // Zero vector normalizes to zero; callers that need a direction must guard.
  Vec2 normalized() const {
    const double n = norm();
    return n < kEps ? Vec2{0.0, 0.0} : Vec2{x / n, y / n};
  }

  Vec2 rotated(double radians) const {
    const double c = std::cos(radians);
    const double s = std::sin(radians);
    return {c * x - s * y, s * x + c * y};
  }

  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline constexpr Vec2 operator*(double s, const Vec2& v) { return v * s; }

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

inline double deg_to_rad(double d) { return d * kPi / 180.0; }
inline double rad_to_deg(double r) { return r * 180.0 / kPi; }

// Unsigned angle between two vectors in radians; 0 if either is near zero.
inline double angle_between(const Vec2& a, const Vec2& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na < kEps || nb < kEps) return 0.0;
  double c = dot(a, b) / (na * nb);
  c = std::clamp(c, -1.0, 1.0);
  return std::acos(c);
}

// Signed angle from `a` to `b` in radians, counterclockwise positive.
inline double signed_angle(const Vec2& a, const Vec2& b) {
  if (a.norm() < kEps || b.norm() < kEps) return 0.0;
  return std::atan2(cross(a, b), dot(a, b));
}

// Bearing of `rel` with respect to `heading`, in degrees, positive to the
// right of the heading.
inline double bearing_right_deg(const Vec2& heading, const Vec2& rel) {
  return -rad_to_deg(signed_angle(heading, rel));
}

inline Vec2 closest_point_on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  const Vec2 ab = b - a;
  const double len_sq = ab.norm_sq();
  if (len_sq < kEps * kEps) return a;
  const double t = std::clamp(dot(p - a, ab) / len_sq, 0.0, 1.0);
  return a + ab * t;
}

inline double distance_to_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return distance(p, closest_point_on_segment(a, b, p));
}

inline double distance_to_polyline(std::span<const Vec2> pts, const Vec2& p) {
  if (pts.empty()) throw Error("distance_to_polyline: empty polyline");
  if (pts.size() == 1) return distance(pts[0], p);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    best = std::min(best, distance_to_segment(pts[i], pts[i + 1], p));
  }
  return best;
}

// Signed area; positive for counterclockwise winding.
inline double polygon_signed_area(std::span<const Vec2> poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % poly.size()];
    a += cross(p, q);
  }
  return 0.5 * a;
}

// Point-in-convex-polygon test; points on the boundary count as inside.
inline bool point_in_convex_polygon(std::span<const Vec2> poly, const Vec2& p) {
  if (poly.size() < 3) throw Error("point_in_convex_polygon: need >= 3 vertices");
  const double orient = polygon_signed_area(poly) >= 0.0 ? 1.0 : -1.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    if (orient * cross(b - a, p - a) < -kEps) return false;
  }
  return true;
}

}  // namespace intersim
