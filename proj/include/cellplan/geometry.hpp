#pragma once

#include <cmath>
#include <stdexcept>

namespace cellplan {

// Cartesian point in meters. 2-D worlds keep z = 0.
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

inline Point3 operator+(const Point3& a, const Point3& b) {
  return {a.x + b.x, a.y + b.y, a.z + b.z};
}

inline Point3 operator-(const Point3& a, const Point3& b) {
  return {a.x - b.x, a.y - b.y, a.z - b.z};
}

inline Point3 operator*(double s, const Point3& p) {
  return {s * p.x, s * p.y, s * p.z};
}

inline bool operator==(const Point3& a, const Point3& b) {
  return a.x == b.x && a.y == b.y && a.z == b.z;
}

inline bool operator!=(const Point3& a, const Point3& b) { return !(a == b); }

inline double dot(const Point3& a, const Point3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline Point3 cross(const Point3& a, const Point3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Point3& a) { return std::sqrt(dot(a, a)); }

inline double euclid_dist(const Point3& a, const Point3& b) {
  return norm(a - b);
}

// Infinite reference line through two anchor points.
struct LineRef {
  Point3 start;
  Point3 goal;
};

// Straight-line distance to the goal.
inline double heuristic_h(const Point3& p, const Point3& goal) {
  return euclid_dist(p, goal);
}

// Perpendicular distance from p to the infinite line through the anchors.
// Degenerate anchors (start == goal) collapse to point distance.
inline double line_dist(const Point3& p, const LineRef& line) {
  const Point3 v = line.goal - line.start;
  const double vv = dot(v, v);
  if (vv == 0.0) return euclid_dist(p, line.start);
  const Point3 c = cross(p - line.start, v);
  return std::sqrt(dot(c, c) / vv);
}

// Goal distance plus weighted start distance; w_g must lie in [0, 1].
inline double hybrid_heuristic(const Point3& p, const Point3& start,
                               const Point3& goal, double w_g) {
  if (!(w_g >= 0.0 && w_g <= 1.0))
    throw std::invalid_argument("hybrid_heuristic: w_g must be in [0, 1]");
  return euclid_dist(p, goal) + w_g * euclid_dist(p, start);
}

}  // namespace cellplan
