#pragma once

#include <span>
#include <string>
#include <vector>

#include "trimquad/geometry.hpp"

namespace trimquad {

/// Intersection of a trimming curve with an axis-aligned segment.
struct EdgeHit {
  double t = 0.0;       ///< curve parameter
  double s = 0.0;       ///< coordinate along the segment axis
  Point2 point;
  bool tangential = false;
};

/// Oriented trimming curve gamma(t), t in [0,1]. The valid region lies to its left.
class TrimmingCurve {
 public:
  enum class Kind { Line, Arc, Bezier };

  /// Segment from a to b (used as a half-plane boundary).
  static TrimmingCurve line(Point2 a, Point2 b);
  /// Circular arc theta0 -> theta1; counter-clockwise (theta1 > theta0) keeps the disk.
  static TrimmingCurve arc(Point2 center, double radius, double theta0, double theta1);
  /// Polynomial curve in Bernstein form.
  static TrimmingCurve bezier(std::vector<Point2> controlPoints);

  Kind kind() const noexcept { return kind_; }
  Point2 eval(double t) const;
  Point2 derivative(double t) const;

  /// Side test; `bounds` closes open polynomial curves along the domain boundary.
  bool inside(Point2 p, const Rect& bounds) const;
  /// Distance from p to the curve.
  double distance(Point2 p) const;

  std::span<const Point2> controlPoints() const { return ctrl_; }
  Point2 center() const { return center_; }
  double radius() const { return radius_; }
  /// Arc parameter of the polar angle theta (values outside [0,1] are off the arc).
  double arcParameterOf(double theta) const;

 private:
  TrimmingCurve() = default;
  int rayToggles(Point2 p) const;
  double nearestParameter(Point2 p) const;  // polynomial curves

  Kind kind_ = Kind::Line;
  std::vector<Point2> ctrl_;  // line: {a,b}; bezier: control points
  Point2 center_;
  double radius_ = 0.0;
  double theta0_ = 0.0;
  double theta1_ = 0.0;
};

/// All intersections of `curve` with the axis-aligned segment a-b, sorted along the segment.
/// Transversal hits are refined to |residual| <= 1e-12; tangential touches are flagged.
std::vector<EdgeHit> intersectEdge(const TrimmingCurve& curve, Point2 a, Point2 b);

/// Rectangular parameter domain restricted by trimming curves.
class TrimmedDomain {
 public:
  TrimmedDomain(Rect bounds, std::vector<TrimmingCurve> curves, std::string name = {});

  const Rect& bounds() const noexcept { return bounds_; }
  std::span<const TrimmingCurve> curves() const { return curves_; }
  const std::string& name() const noexcept { return name_; }

  /// Inside every curve's valid side (points on a curve count as inside).
  bool inside(Point2 p) const;
  /// inside(p) or within tol of a trimming curve.
  bool insideWithin(Point2 p, double tol) const;

 private:
  Rect bounds_;
  std::vector<TrimmingCurve> curves_;
  std::string name_;
};

/// Transversal crossing of a trimming curve with the boundary of a cell.
struct CellCrossing {
  double s = 0.0;  ///< perimeter coordinate on the cell, see perimeterParameter
  Point2 point;
  double t = 0.0;  ///< curve parameter
  int curve = 0;
};

/// Corner-snapping distance relative to the cell size.
constexpr double kSnapTolerance = 1e-10;

/// Crossings of all trimming curves with the boundary of `cell`, sorted by s. Hits
/// within kSnapTolerance * cell size of a corner are moved onto it and merged;
/// tangential touches are dropped.
std::vector<CellCrossing> cellCrossings(const TrimmedDomain& domain, const Rect& cell);

/// Point classification against the valid region.
inline bool classifyPoint(const TrimmedDomain& domain, Point2 p) { return domain.inside(p); }

/// Canonical trimming cases on [0,1]^2.
TrimmedDomain untrimmedCase();
TrimmedDomain lineCase(double level = 0.37);
TrimmedDomain circleCase(double radius = 0.8);
TrimmedDomain cornerCase();
/// "none", "line", "circle" or "corner"; throws std::invalid_argument otherwise.
TrimmedDomain caseByName(const std::string& name);

}  // namespace trimquad
