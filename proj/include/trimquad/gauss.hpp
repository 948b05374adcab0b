#pragma once

#include <vector>

namespace trimquad {

/// Quadrature rule on the reference interval [-1,1].
struct GaussRule {
  std::vector<double> points;
  std::vector<double> weights;

  int size() const { return static_cast<int>(points.size()); }
  /// Affine copy of the rule on [a,b].
  GaussRule mapped(double a, double b) const;
};

/// n-point Gauss-Legendre rule, exact for polynomials of degree 2n-1. Throws for n < 1.
GaussRule gaussLegendre(int n);

/// n-point Gauss-Lobatto rule (includes both end points), exact to degree 2n-3. Throws for n < 2.
GaussRule gaussLobatto(int n);

}  // namespace trimquad
