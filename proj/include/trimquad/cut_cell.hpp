#pragma once

#include <array>
#include <vector>

#include "trimquad/classification.hpp"
#include "trimquad/curves.hpp"

namespace trimquad {

constexpr int kMaxCutDegree = 6;
constexpr int kMaxSplitDepth = 4;

/// Mapped quadrilateral x(xi,eta) = (1-eta) B(xi) + eta T(xi) on [0,1]^2.
///
/// Vertices are counter-clockwise; the bottom edge B runs v0 -> v1 and the top edge T
/// runs v3 -> v2. Either edge may collapse to a point (triangles). A curved top edge is
/// the Lagrange interpolant through `top` at the Gauss-Lobatto parameters `topXi`.
struct SubCell {
  std::array<Point2, 4> vertices;
  std::vector<Point2> top;
  std::vector<double> topXi;

  bool curved() const { return !top.empty(); }
  Point2 topAt(double xi) const;
  Point2 topDerivative(double xi) const;
  Point2 map(double xi, double eta) const;
  double jacobian(double xi, double eta) const;
};

/// Split the valid part of `cell` into sub-cells with at most one curved edge (degree q).
/// Cells with more than two crossings, or both crossings on one edge, are split into
/// four recursively up to kMaxSplitDepth. Throws ConfigurationError when that fails.
std::vector<SubCell> decomposeCutElement(const TrimmedDomain& domain, const Rect& cell, int q);

/// Points and weights of one cut element.
struct CutElementRule {
  int element = -1;
  int subCells = 0;
  std::vector<Point2> points;
  std::vector<double> weights;

  double area() const;
};

/// n x n Gauss per sub-cell, weight times Jacobian. A non-positive Jacobian
/// throws ConfigurationError naming `element`.
CutElementRule integrateSubCells(const std::vector<SubCell>& cells, int n, int element);

/// Quadrature on all cut elements of a configuration.
struct CutCellQuadrature {
  int q = 0;
  int gaussPoints = 0;  ///< per sub-cell direction
  std::vector<CutElementRule> rules;
  std::vector<int> ruleOf;  ///< per flat element: index into rules or -1

  const CutElementRule* find(int element) const {
    const int k = ruleOf[element];
    return k < 0 ? nullptr : &rules[k];
  }
  std::size_t numPoints() const;
};

/// Geometry of degree q; gaussPoints = 0 means q+1 points per direction.
CutCellQuadrature cutCellQuadrature(const TrimConfiguration& config, int q, bool parallel = false,
                                    int gaussPoints = 0);

}  // namespace trimquad
