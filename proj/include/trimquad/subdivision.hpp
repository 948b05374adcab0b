#pragma once

#include <Eigen/SparseCore>

#include <span>
#include <utility>

#include "trimquad/basis.hpp"

namespace trimquad {

/// Linear map from coarse to refined B-spline coefficients, refined = S * coarse.
///
/// Equivalently B_j^coarse = sum_i S(i,j) B_i^fine. The rows of S sum to one.
struct SubdivisionMatrix {
  Eigen::SparseMatrix<double, Eigen::RowMajor> entries;  ///< (n_fine x n_coarse)
  Basis1D source;
  Basis1D target;
};

/// Insert one knot `ubar`; values within kKnotTolerance of an existing knot snap to it.
/// Throws std::invalid_argument if the multiplicity would exceed p+1.
std::pair<Basis1D, SubdivisionMatrix> insertKnot(const Basis1D& basis, double ubar);

/// Composite subdivision matrix to the nested basis with knots `targetKnots`.
/// Throws std::invalid_argument unless targetKnots contains the source knots as a multiset.
SubdivisionMatrix subdivisionMatrixTo(const Basis1D& basis, std::span<const double> targetKnots);

/// Raise the multiplicity of the breakpoint `u` to p+1 (C^-1 continuity there).
SubdivisionMatrix makeDiscontinuous(const Basis1D& basis, double u);

}  // namespace trimquad
