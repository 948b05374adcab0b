#include "trimquad/cut_cell.hpp"

#include <cmath>
#include <exception>
#include <stdexcept>
#include <string>

#include "trimquad/errors.hpp"
#include "trimquad/gauss.hpp"

namespace trimquad {

Point2 SubCell::topAt(double xi) const {
  if (!curved()) return vertices[3] + xi * (vertices[2] - vertices[3]);
  Point2 p;
  const std::size_t n = top.size();
  for (std::size_t k = 0; k < n; ++k) {
    double l = 1.0;
    for (std::size_t m = 0; m < n; ++m) {
      if (m != k) l *= (xi - topXi[m]) / (topXi[k] - topXi[m]);
    }
    p = p + l * top[k];
  }
  return p;
}

Point2 SubCell::topDerivative(double xi) const {
  if (!curved()) return vertices[2] - vertices[3];
  Point2 d;
  const std::size_t n = top.size();
  for (std::size_t k = 0; k < n; ++k) {
    double dl = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      if (m == k) continue;
      double term = 1.0 / (topXi[k] - topXi[m]);
      for (std::size_t l = 0; l < n; ++l) {
        if (l != k && l != m) term *= (xi - topXi[l]) / (topXi[k] - topXi[l]);
      }
      dl += term;
    }
    d = d + dl * top[k];
  }
  return d;
}

Point2 SubCell::map(double xi, double eta) const {
  const Point2 b = vertices[0] + xi * (vertices[1] - vertices[0]);
  return (1.0 - eta) * b + eta * topAt(xi);
}

double SubCell::jacobian(double xi, double eta) const {
  const Point2 b = vertices[0] + xi * (vertices[1] - vertices[0]);
  const Point2 dxi = (1.0 - eta) * (vertices[1] - vertices[0]) + eta * topDerivative(xi);
  const Point2 deta = topAt(xi) - b;
  return cross(dxi, deta);
}

namespace {

SubCell straight(Point2 v0, Point2 v1, Point2 v2, Point2 v3) { return SubCell{{v0, v1, v2, v3}, {}, {}}; }

// Edges of the cell boundary that contain perimeter coordinate s (two at a corner).
std::vector<int> edgesOf(double s) {
  const double r = std::round(s);
  if (std::abs(s - r) <= 1e-12) {
    const int k = static_cast<int>(r) % 4;
    return {(k + 3) % 4, k};
  }
  return {static_cast<int>(std::floor(s)) % 4};
}

bool shareEdge(double a, double b) {
  for (int x : edgesOf(a)) {
    for (int y : edgesOf(b)) {
      if (x == y) return true;
    }
  }
  return false;
}

class Decomposer {
 public:
  Decomposer(const TrimmedDomain& domain, int q) : domain_(domain) {
    const GaussRule gll = gaussLobatto(q + 1);
    for (double x : gll.points) xi_.push_back(0.5 * (x + 1.0));
  }

  void run(const Rect& cell, int depth, std::vector<SubCell>& out) const {
    const std::vector<CellCrossing> xs = cellCrossings(domain_, cell);
    if (xs.size() < 2) {
      if (domain_.inside(cell.center())) {
        out.push_back(straight(cell.corner(0), cell.corner(1), cell.corner(2), cell.corner(3)));
      }
      return;
    }
    const bool simple = xs.size() == 2 && xs[0].curve == xs[1].curve && !shareEdge(xs[0].s, xs[1].s);
    if (!simple && depth < kMaxSplitDepth) {
      const Point2 c = cell.center();
      for (const Rect& r : {Rect{cell.x0, c.x, cell.y0, c.y}, Rect{c.x, cell.x1, cell.y0, c.y},
                            Rect{c.x, cell.x1, c.y, cell.y1}, Rect{cell.x0, c.x, c.y, cell.y1}}) {
        run(r, depth + 1, out);
      }
      return;
    }
    if (xs.size() != 2 || xs[0].curve != xs[1].curve) {
      throw ConfigurationError("more than two curve crossings after " + std::to_string(kMaxSplitDepth) +
                               " splits");
    }

    // The inside boundary arc runs counter-clockwise from A over corners c1..cm to B;
    // the curve closes it from B back to A.
    const double sa = xs[0].s;
    const double sb = xs[1].s;
    const bool firstArcInside = domain_.inside(perimeterPoint(cell, 0.5 * (sa + sb)));
    const CellCrossing& A = firstArcInside ? xs[0] : xs[1];
    const CellCrossing& B = firstArcInside ? xs[1] : xs[0];
    const double from = A.s;
    const double to = B.s > A.s ? B.s : B.s + 4.0;
    std::vector<Point2> corners;
    for (int k = static_cast<int>(std::floor(from)) + 1; k < to - 1e-12; ++k) corners.push_back(cell.corner(k));

    SubCell curvedCell;
    curvedCell.topXi = xi_;
    const TrimmingCurve& curve = domain_.curves()[A.curve];
    for (double x : xi_) curvedCell.top.push_back(curve.eval(A.t + x * (B.t - A.t)));
    curvedCell.top.front() = A.point;
    curvedCell.top.back() = B.point;

    auto emitCurved = [&](Point2 v0, Point2 v1) {
      curvedCell.vertices = {v0, v1, B.point, A.point};
      out.push_back(curvedCell);
    };
    switch (corners.size()) {
      case 0:  // lens between one edge and the curve
        emitCurved(A.point, B.point);
        break;
      case 1:
        emitCurved(corners[0], corners[0]);
        break;
      case 2:
        emitCurved(corners[0], corners[1]);
        break;
      case 3:
        out.push_back(straight(corners[0], corners[1], A.point, A.point));
        out.push_back(straight(corners[1], corners[2], B.point, B.point));
        emitCurved(corners[1], corners[1]);
        break;
      default:
        throw ConfigurationError("curve enters and leaves the cell through one edge");
    }
  }

 private:
  const TrimmedDomain& domain_;
  std::vector<double> xi_;
};

}  // namespace

std::vector<SubCell> decomposeCutElement(const TrimmedDomain& domain, const Rect& cell, int q) {
  if (q < 1 || q > kMaxCutDegree) throw std::invalid_argument("cut-cell degree must be in 1..6");
  std::vector<SubCell> out;
  Decomposer(domain, q).run(cell, 0, out);
  return out;
}

double CutElementRule::area() const {
  double a = 0.0;
  for (double w : weights) a += w;
  return a;
}

CutElementRule integrateSubCells(const std::vector<SubCell>& cells, int n, int element) {
  const GaussRule g = gaussLegendre(n).mapped(0.0, 1.0);
  CutElementRule rule;
  rule.element = element;
  rule.subCells = static_cast<int>(cells.size());
  for (const SubCell& c : cells) {
    for (int i = 0; i < g.size(); ++i) {
      for (int j = 0; j < g.size(); ++j) {
        const double det = c.jacobian(g.points[i], g.points[j]);
        if (!(det > 0.0)) {
          throw ConfigurationError("non-positive sub-cell Jacobian in cut element " + std::to_string(element));
        }
        rule.points.push_back(c.map(g.points[i], g.points[j]));
        rule.weights.push_back(g.weights[i] * g.weights[j] * det);
      }
    }
  }
  return rule;
}

std::size_t CutCellQuadrature::numPoints() const {
  std::size_t n = 0;
  for (const CutElementRule& r : rules) n += r.points.size();
  return n;
}

CutCellQuadrature cutCellQuadrature(const TrimConfiguration& config, int q, bool parallel, int gaussPoints) {
  CutCellQuadrature out;
  out.q = q;
  out.gaussPoints = gaussPoints > 0 ? gaussPoints : q + 1;
  out.ruleOf.assign(config.elements.size(), -1);
  std::vector<int> cut;
  for (int e = 0; e < static_cast<int>(config.elements.size()); ++e) {
    if (config.elements[e] == Location::Cut) {
      out.ruleOf[e] = static_cast<int>(cut.size());
      cut.push_back(e);
    }
  }
  out.rules.resize(cut.size());
  std::exception_ptr failure;
  const int n = static_cast<int>(cut.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int k = 0; k < n; ++k) {
    try {
      const int e = cut[k];
      CutElementRule r;
      try {
        r = integrateSubCells(decomposeCutElement(config.domain, config.elementRect(e), q), out.gaussPoints, e);
      } catch (const ConfigurationError& err) {
        const auto [e1, e2] = config.basis.splitElement(e);
        throw ConfigurationError(std::string(err.what()) + " (element " + std::to_string(e1) + "," +
                                 std::to_string(e2) + ")");
      }
      out.rules[k] = std::move(r);
    } catch (...) {
#pragma omp critical(trimquad_cut_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace trimquad
