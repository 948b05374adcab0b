#include "trimquad/curves.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "trimquad/errors.hpp"

namespace trimquad {

namespace {

constexpr double kOnCurve = 1e-12;
constexpr double kZero = 1e-14;

double deCasteljau(std::span<const double> c, double t) {
  double buf[32]{};
  const std::size_t n = c.size();
  std::copy(c.begin(), c.end(), buf);
  for (std::size_t r = 1; r < n; ++r) {
    for (std::size_t k = 0; k + r < n; ++k) buf[k] = (1.0 - t) * buf[k] + t * buf[k + 1];
  }
  return buf[0];
}

std::vector<double> derivativeCoefficients(std::span<const double> c) {
  std::vector<double> d;
  const double n = static_cast<double>(c.size()) - 1.0;
  for (std::size_t k = 0; k + 1 < c.size(); ++k) d.push_back(n * (c[k + 1] - c[k]));
  return d;
}

struct Root {
  double t;
  bool tangential;
};

// Root on a bracket where g is monotone: safeguarded Newton, bisection when a step leaves it.
double refineRoot(std::span<const double> c, std::span<const double> dc, double a, double b, double ga) {
  double t = 0.5 * (a + b);
  for (int it = 0; it < 200; ++it) {
    const double g = deCasteljau(c, t);
    if (g == 0.0) return t;
    if ((g > 0.0) == (ga > 0.0)) {
      a = t;
      ga = g;
    } else {
      b = t;
    }
    if (b - a <= 4.0 * std::numeric_limits<double>::epsilon()) break;
    const double d = dc.empty() ? 0.0 : deCasteljau(dc, t);
    double next = d != 0.0 ? t - g / d : 0.5 * (a + b);
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    if (std::abs(next - t) <= 1e-17) break;
    t = next;
  }
  return t;
}

// Roots in [0,1] of a polynomial in Bernstein form. The interval is split at the
// critical points (recursively), so every piece is monotone and holds at most one root.
std::vector<Root> bernsteinRoots(std::span<const double> c) {
  std::vector<Root> roots;
  if (c.size() < 2) return roots;
  const std::vector<double> dc = derivativeCoefficients(c);
  double scale = 0.0;
  for (double v : c) scale = std::max(scale, std::abs(v));
  const double tol = kZero * std::max(1.0, scale);

  std::vector<double> breaks{0.0};
  for (const Root& r : bernsteinRoots(dc)) {
    if (r.t > breaks.back() + 1e-15 && r.t < 1.0 - 1e-15) breaks.push_back(r.t);
  }
  breaks.push_back(1.0);

  std::vector<double> g(breaks.size());
  for (std::size_t k = 0; k < breaks.size(); ++k) g[k] = deCasteljau(c, breaks[k]);
  auto midValue = [&](std::size_t piece) { return deCasteljau(c, 0.5 * (breaks[piece] + breaks[piece + 1])); };

  for (std::size_t k = 0; k < breaks.size(); ++k) {
    if (std::abs(g[k]) <= tol) {
      bool tangential = false;
      if (k > 0 && k + 1 < breaks.size()) tangential = (midValue(k - 1) > 0.0) == (midValue(k) > 0.0);
      roots.push_back({breaks[k], tangential});
    }
    if (k + 1 < breaks.size() && std::abs(g[k]) > tol && std::abs(g[k + 1]) > tol &&
        (g[k] > 0.0) != (g[k + 1] > 0.0)) {
      roots.push_back({refineRoot(c, dc, breaks[k], breaks[k + 1], g[k]), false});
    }
  }
  std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) { return a.t < b.t; });
  return roots;
}

std::vector<double> coordinate(std::span<const Point2> ctrl, Axis axis, double shift) {
  std::vector<double> c;
  for (const Point2& p : ctrl) c.push_back(component(p, axis) - shift);
  return c;
}

double wrapAngle(double d) {
  constexpr double twoPi = 2.0 * std::numbers::pi;
  d = std::fmod(d, twoPi);
  if (d < -1e-9) d += twoPi;
  if (d >= twoPi - 1e-9) d -= twoPi;
  return d;
}

}  // namespace

TrimmingCurve TrimmingCurve::line(Point2 a, Point2 b) {
  if (a == b) throw std::invalid_argument("line: end points coincide");
  TrimmingCurve c;
  c.kind_ = Kind::Line;
  c.ctrl_ = {a, b};
  return c;
}

TrimmingCurve TrimmingCurve::arc(Point2 center, double radius, double theta0, double theta1) {
  if (!(radius > 0.0) || theta0 == theta1) throw std::invalid_argument("arc: degenerate");
  TrimmingCurve c;
  c.kind_ = Kind::Arc;
  c.center_ = center;
  c.radius_ = radius;
  c.theta0_ = theta0;
  c.theta1_ = theta1;
  return c;
}

TrimmingCurve TrimmingCurve::bezier(std::vector<Point2> controlPoints) {
  if (controlPoints.size() < 2 || controlPoints.size() > 16) {
    throw std::invalid_argument("bezier: need 2..16 control points");
  }
  TrimmingCurve c;
  c.kind_ = Kind::Bezier;
  c.ctrl_ = std::move(controlPoints);
  return c;
}

Point2 TrimmingCurve::eval(double t) const {
  switch (kind_) {
    case Kind::Line:
      return ctrl_[0] + t * (ctrl_[1] - ctrl_[0]);
    case Kind::Arc: {
      const double th = theta0_ + t * (theta1_ - theta0_);
      return {center_.x + radius_ * std::cos(th), center_.y + radius_ * std::sin(th)};
    }
    case Kind::Bezier:
      break;
  }
  return {deCasteljau(coordinate(ctrl_, Axis::X, 0.0), t), deCasteljau(coordinate(ctrl_, Axis::Y, 0.0), t)};
}

Point2 TrimmingCurve::derivative(double t) const {
  switch (kind_) {
    case Kind::Line:
      return ctrl_[1] - ctrl_[0];
    case Kind::Arc: {
      const double dth = theta1_ - theta0_;
      const double th = theta0_ + t * dth;
      return {-radius_ * dth * std::sin(th), radius_ * dth * std::cos(th)};
    }
    case Kind::Bezier:
      break;
  }
  const auto dx = derivativeCoefficients(coordinate(ctrl_, Axis::X, 0.0));
  const auto dy = derivativeCoefficients(coordinate(ctrl_, Axis::Y, 0.0));
  return {deCasteljau(dx, t), deCasteljau(dy, t)};
}

double TrimmingCurve::arcParameterOf(double theta) const {
  const double span = theta1_ - theta0_;
  return span > 0.0 ? wrapAngle(theta - theta0_) / span : wrapAngle(theta0_ - theta) / -span;
}

double TrimmingCurve::nearestParameter(Point2 p) const {
  // Coarse sampling, then Newton on (gamma - p) . gamma' = 0.
  constexpr int samples = 64;
  double t = 0.0;
  double best = trimquad::distance(p, eval(0.0));
  for (int k = 1; k <= samples; ++k) {
    const double s = static_cast<double>(k) / samples;
    if (const double d = trimquad::distance(p, eval(s)); d < best) {
      best = d;
      t = s;
    }
  }
  const auto dx = derivativeCoefficients(coordinate(ctrl_, Axis::X, 0.0));
  const auto dy = derivativeCoefficients(coordinate(ctrl_, Axis::Y, 0.0));
  const auto ddx = derivativeCoefficients(dx);
  const auto ddy = derivativeCoefficients(dy);
  for (int it = 0; it < 30; ++it) {
    const Point2 r = eval(t) - p;
    const Point2 d1{deCasteljau(dx, t), deCasteljau(dy, t)};
    const Point2 d2 = ddx.empty() ? Point2{} : Point2{deCasteljau(ddx, t), deCasteljau(ddy, t)};
    const double fp = dot(d1, d1) + dot(r, d2);
    if (fp <= 0.0) break;
    const double next = std::clamp(t - dot(r, d1) / fp, 0.0, 1.0);
    if (std::abs(next - t) < 1e-16) break;
    t = next;
  }
  return t;
}

double TrimmingCurve::distance(Point2 p) const {
  switch (kind_) {
    case Kind::Line: {
      const Point2 d = ctrl_[1] - ctrl_[0];
      const double t = std::clamp(dot(p - ctrl_[0], d) / dot(d, d), 0.0, 1.0);
      return trimquad::distance(p, eval(t));
    }
    case Kind::Arc: {
      const double t = arcParameterOf(std::atan2(p.y - center_.y, p.x - center_.x));
      if (t >= 0.0 && t <= 1.0) return std::abs(trimquad::distance(p, center_) - radius_);
      return std::min(trimquad::distance(p, eval(0.0)), trimquad::distance(p, eval(1.0)));
    }
    case Kind::Bezier:
      break;
  }
  return trimquad::distance(p, eval(nearestParameter(p)));
}

int TrimmingCurve::rayToggles(Point2 p) const {
  // Changes of the indicator [y(t) > p.y] along the curve, located to the right of p.
  const auto g = coordinate(ctrl_, Axis::Y, p.y);
  std::vector<double> breaks{0.0};
  for (const Root& r : bernsteinRoots(g)) {
    if (r.t > breaks.back() + 1e-15 && r.t < 1.0 - 1e-15) breaks.push_back(r.t);
  }
  breaks.push_back(1.0);

  int toggles = 0;
  bool state = deCasteljau(g, 0.0) > 0.0;
  auto visit = [&](bool next, double t) {
    if (next != state && eval(t).x > p.x) ++toggles;
    state = next;
  };
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    visit(deCasteljau(g, 0.5 * (breaks[k] + breaks[k + 1])) > 0.0, breaks[k]);
  }
  visit(deCasteljau(g, 1.0) > 0.0, 1.0);
  return toggles;
}

bool TrimmingCurve::inside(Point2 p, const Rect& bounds) const {
  switch (kind_) {
    case Kind::Line:
      return cross(ctrl_[1] - ctrl_[0], p - ctrl_[0]) >= 0.0;
    case Kind::Arc: {
      const double d = trimquad::distance(p, center_);
      return theta1_ > theta0_ ? d <= radius_ : d >= radius_;
    }
    case Kind::Bezier:
      break;
  }
  // Points on the curve: side of the tangent at the nearest point, ties count as inside.
  double x0 = ctrl_[0].x, x1 = x0, y0 = ctrl_[0].y, y1 = y0;
  for (const Point2& c : ctrl_) {
    x0 = std::min(x0, c.x);
    x1 = std::max(x1, c.x);
    y0 = std::min(y0, c.y);
    y1 = std::max(y1, c.y);
  }
  if (Rect{x0, x1, y0, y1}.contains(p, kOnCurve)) {
    const double t = nearestParameter(p);
    const Point2 q = eval(t);
    if (trimquad::distance(p, q) <= kOnCurve) {
      const Point2 d = derivative(t);
      return cross(d, p - q) >= -kOnCurve * norm(d);
    }
  }

  // Ray casting on the loop closed counter-clockwise along the domain boundary.
  int toggles = rayToggles(p);
  const Point2 start = eval(1.0);
  const Point2 end = eval(0.0);
  double s1 = perimeterParameter(bounds, start);
  double s0 = perimeterParameter(bounds, end);
  if (s0 <= s1) s0 += 4.0;
  std::vector<Point2> loop{start};
  for (int k = static_cast<int>(std::floor(s1)) + 1; k < s0; ++k) loop.push_back(bounds.corner(k));
  loop.push_back(end);
  for (std::size_t k = 0; k + 1 < loop.size(); ++k) {
    const Point2 a = loop[k];
    const Point2 b = loop[k + 1];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (x > p.x) ++toggles;
    }
  }
  return toggles % 2 == 1;
}

std::vector<EdgeHit> intersectEdge(const TrimmingCurve& curve, Point2 a, Point2 b) {
  Axis along;
  if (a.y == b.y) {
    along = Axis::X;
  } else if (a.x == b.x) {
    along = Axis::Y;
  } else {
    throw std::invalid_argument("intersectEdge: segment is not axis-aligned");
  }
  const Axis fixed = along == Axis::X ? Axis::Y : Axis::X;
  const double level = component(a, fixed);
  const double lo = std::min(component(a, along), component(b, along));
  const double hi = std::max(component(a, along), component(b, along));
  const double tol = 1e-13 * std::max(1.0, hi - lo);

  std::vector<EdgeHit> hits;
  auto accept = [&](double t, double s, bool tangential) {
    if (t < -1e-12 || t > 1.0 + 1e-12 || s < lo - tol || s > hi + tol) return;
    EdgeHit h;
    h.t = std::clamp(t, 0.0, 1.0);
    h.s = std::clamp(s, lo, hi);
    h.point = along == Axis::X ? Point2{h.s, level} : Point2{level, h.s};
    h.tangential = tangential;
    hits.push_back(h);
  };

  switch (curve.kind()) {
    case TrimmingCurve::Kind::Line: {
      const Point2 p0 = curve.eval(0.0);
      const Point2 d = curve.derivative(0.0);
      const double df = component(d, fixed);
      if (df != 0.0) {
        const double t = (level - component(p0, fixed)) / df;
        accept(t, component(p0, along) + t * component(d, along), false);
      }
      break;
    }
    case TrimmingCurve::Kind::Arc: {
      const double r = curve.radius();
      const double off = level - component(curve.center(), fixed);
      const double disc = r * r - off * off;
      if (disc < -kZero * r * r) break;
      const double c = component(curve.center(), along);
      const bool tangent = std::abs(disc) <= kZero * r * r;
      const double root = tangent ? 0.0 : std::sqrt(disc);
      for (double s : tangent ? std::vector<double>{c} : std::vector<double>{c - root, c + root}) {
        const Point2 q = along == Axis::X ? Point2{s, level} : Point2{level, s};
        const Point2 rel = q - curve.center();
        accept(curve.arcParameterOf(std::atan2(rel.y, rel.x)), s, tangent);
      }
      break;
    }
    case TrimmingCurve::Kind::Bezier: {
      const auto g = coordinate(curve.controlPoints(), fixed, level);
      for (const Root& r : bernsteinRoots(g)) accept(r.t, component(curve.eval(r.t), along), r.tangential);
      break;
    }
  }
  const double sa = component(a, along);
  std::sort(hits.begin(), hits.end(),
            [&](const EdgeHit& x, const EdgeHit& y) { return std::abs(x.s - sa) < std::abs(y.s - sa); });
  return hits;
}

TrimmedDomain::TrimmedDomain(Rect bounds, std::vector<TrimmingCurve> curves, std::string name)
    : bounds_(bounds), curves_(std::move(curves)), name_(std::move(name)) {
  for (const TrimmingCurve& c : curves_) {
    if (c.kind() != TrimmingCurve::Kind::Bezier) continue;
    for (double t : {0.0, 1.0}) {
      const Point2 p = c.eval(t);
      if (!onBoundary(bounds_, p)) {
        throw ConfigurationError("polynomial trimming curve must start and end on the domain boundary");
      }
    }
  }
}

bool TrimmedDomain::inside(Point2 p) const {
  return std::all_of(curves_.begin(), curves_.end(), [&](const TrimmingCurve& c) { return c.inside(p, bounds_); });
}

bool TrimmedDomain::insideWithin(Point2 p, double tol) const {
  for (const TrimmingCurve& c : curves_) {
    if (!c.inside(p, bounds_) && c.distance(p) > tol) return false;
  }
  return true;
}

std::vector<CellCrossing> cellCrossings(const TrimmedDomain& domain, const Rect& cell) {
  std::vector<CellCrossing> out;
  const double snap = kSnapTolerance * cell.size();
  const auto curves = domain.curves();
  for (std::size_t ci = 0; ci < curves.size(); ++ci) {
    for (int k = 0; k < 4; ++k) {
      for (const EdgeHit& h : intersectEdge(curves[ci], cell.corner(k), cell.corner(k + 1))) {
        if (h.tangential) continue;
        CellCrossing c{perimeterParameter(cell, h.point), h.point, h.t, static_cast<int>(ci)};
        for (int j = 0; j < 4; ++j) {
          if (distance(h.point, cell.corner(j)) <= snap) {
            c.point = cell.corner(j);
            c.s = j;
          }
        }
        const bool duplicate = std::any_of(out.begin(), out.end(), [&](const CellCrossing& o) {
          const double ds = std::abs(o.s - c.s);
          return o.curve == c.curve && std::min(ds, 4.0 - ds) <= 1e-12;
        });
        if (!duplicate) out.push_back(c);
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const CellCrossing& a, const CellCrossing& b) { return a.s < b.s; });
  return out;
}

TrimmedDomain untrimmedCase() { return TrimmedDomain(Rect{}, {}, "none"); }

TrimmedDomain lineCase(double level) {
  return TrimmedDomain(Rect{}, {TrimmingCurve::line({1.0, level}, {0.0, level})}, "line");
}

TrimmedDomain circleCase(double radius) {
  return TrimmedDomain(Rect{}, {TrimmingCurve::arc({0.0, 0.0}, radius, 0.0, std::numbers::pi / 2)}, "circle");
}

TrimmedDomain cornerCase() {
  return TrimmedDomain(Rect{}, {TrimmingCurve::bezier({{1.0, 0.33}, {0.75, 0.45}, {0.6, 0.85}, {0.31, 1.0}})},
                       "corner");
}

TrimmedDomain caseByName(const std::string& name) {
  if (name == "none") return untrimmedCase();
  if (name == "line") return lineCase();
  if (name == "circle") return circleCase();
  if (name == "corner") return cornerCase();
  throw std::invalid_argument("unknown trimming case: " + name);
}

}  // namespace trimquad
