#pragma once

#include <cmath>

namespace trimquad {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point2 a, Point2 b) = default;
};

inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

enum class Axis { X = 0, Y = 1 };

inline double component(Point2 p, Axis a) { return a == Axis::X ? p.x : p.y; }

/// Axis-aligned rectangle [x0,x1] x [y0,y1].
struct Rect {
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  double size() const { return width() > height() ? width() : height(); }
  Point2 center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
  bool contains(Point2 p, double tol = 0.0) const {
    return p.x >= x0 - tol && p.x <= x1 + tol && p.y >= y0 - tol && p.y <= y1 + tol;
  }
  /// Corners in counter-clockwise order starting at (x0,y0).
  Point2 corner(int k) const {
    switch (k & 3) {
      case 0: return {x0, y0};
      case 1: return {x1, y0};
      case 2: return {x1, y1};
      default: return {x0, y1};
    }
  }
};

constexpr double kBoundaryTolerance = 1e-12;

/// Whether p lies on the boundary of r (within kBoundaryTolerance).
inline bool onBoundary(const Rect& r, Point2 p) {
  const double t = kBoundaryTolerance;
  if (!r.contains(p, t)) return false;
  return std::abs(p.x - r.x0) <= t || std::abs(p.x - r.x1) <= t || std::abs(p.y - r.y0) <= t ||
         std::abs(p.y - r.y1) <= t;
}

/// Counter-clockwise boundary coordinate s in [0,4) of a boundary point: edge k runs
/// from corner(k) to corner(k+1) over s in [k, k+1].
inline double perimeterParameter(const Rect& r, Point2 p) {
  const double t = kBoundaryTolerance;
  if (std::abs(p.y - r.y0) <= t && p.x < r.x1 - t) return (p.x - r.x0) / r.width();
  if (std::abs(p.x - r.x1) <= t && p.y < r.y1 - t) return 1.0 + (p.y - r.y0) / r.height();
  if (std::abs(p.y - r.y1) <= t && p.x > r.x0 + t) return 2.0 + (r.x1 - p.x) / r.width();
  if (std::abs(p.x - r.x0) <= t) return 3.0 + (r.y1 - p.y) / r.height();
  return 1.0;  // corner (x1, y0) reached through the first test's strict bound
}

/// Inverse of perimeterParameter.
inline Point2 perimeterPoint(const Rect& r, double s) {
  s = std::fmod(s, 4.0);
  if (s < 0.0) s += 4.0;
  const int k = static_cast<int>(s);
  const double f = s - k;
  const Point2 a = r.corner(k);
  const Point2 b = r.corner(k + 1);
  return a + f * (b - a);
}

}  // namespace trimquad
