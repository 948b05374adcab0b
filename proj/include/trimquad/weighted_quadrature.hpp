#pragma once

#include <span>
#include <utility>
#include <vector>

#include "trimquad/basis.hpp"
#include "trimquad/subdivision.hpp"

namespace trimquad {

/// Quadrature points of one parametric direction, grouped by element.
///
/// Points are strictly interior to their element and globally sorted.
struct PointLayout {
  std::vector<double> points;
  std::vector<int> elementOfPoint;
  std::vector<int> elementOffsets;  ///< points of element e are [offsets[e], offsets[e+1])

  int size() const { return static_cast<int>(points.size()); }
  int numElements() const { return static_cast<int>(elementOffsets.size()) - 1; }
  int countIn(int e) const {
    return elementOffsets[static_cast<std::size_t>(e) + 1] - elementOffsets[static_cast<std::size_t>(e)];
  }
  std::span<const double> elementPoints(int e) const {
    return std::span<const double>(points).subspan(
        static_cast<std::size_t>(elementOffsets[static_cast<std::size_t>(e)]),
        static_cast<std::size_t>(countIn(e)));
  }
  /// Half-open index range of the points lying in the open interval (a,b).
  std::pair<int, int> range(double a, double b) const;
  /// Whether every point of `other` also occurs here (within tol).
  bool contains(const PointLayout& other, double tol = 1e-14) const;

  /// Assemble a layout from per-element point lists (each sorted and interior).
  static PointLayout fromElementPoints(const std::vector<std::vector<double>>& perElement);
};

/// Per-element point counts needed so that every test function has at least as
/// many points in its support as overlapping trial functions.
std::vector<int> requiredPointCounts(const Basis1D& basis);

/// Points a + (b-a) k / (n_e+1), k = 1..n_e, in every element.
PointLayout uniformLayout(const Basis1D& basis, std::span<const int> counts);

/// Initial weighted-quadrature layout: requiredPointCounts + uniform interior spacing.
PointLayout placeWQPoints(const Basis1D& basis);

/// b_j = int B_i B_j du for j in basis.overlappingRange(i), element-wise (p+1)-point Gauss.
std::vector<double> exactMoments(const Basis1D& basis, int i);

/// Sparse weights of one test function: w_{k,i} for k in [firstPoint, firstPoint + size).
struct WeightRow {
  int firstPoint = 0;
  std::vector<double> weights;

  int endPoint() const { return firstPoint + static_cast<int>(weights.size()); }
  bool empty() const { return weights.empty(); }
  double at(int k) const {
    return (k >= firstPoint && k < endPoint()) ? weights[static_cast<std::size_t>(k - firstPoint)] : 0.0;
  }
};

/// Weighted quadrature rules Q_i of one direction, one weight row per test function.
struct WeightedRuleSet {
  Basis1D basis;
  PointLayout layout;
  std::vector<WeightRow> rows;
  int direction = 0;
  double maxRelativeResidual = 0.0;
  int enrichmentRounds = 0;
};

/// Moment-fitting weights on `layout` (minimum-norm least squares via an orthogonal
/// factorization). Elements of failing supports receive extra uniform points, up to
/// five rounds; persistent failure throws ConstructionError naming the test function.
WeightedRuleSet computeWQRules(const Basis1D& basis, PointLayout layout, int direction = 0,
                               bool parallel = false);

/// computeWQRules(basis, placeWQPoints(basis)).
WeightedRuleSet buildWQRules(const Basis1D& basis, int direction = 0, bool parallel = false);

enum class Side { Below, Above };

/// Weighted quadrature that is exact on either side of a breakpoint `disc`.
///
/// Built on the basis refined to C^-1 at disc; the weights of the original test
/// functions are recovered as w = S^T w~. Rows exist for test functions whose
/// support contains disc in its interior.
struct DiscontinuousRuleSet {
  Basis1D basis;
  double disc = 0.0;
  int direction = 0;
  SubdivisionMatrix subdivision;  ///< to the C^-1 refined basis
  PointLayout layout;             ///< base layout plus nested points
  int splitPoint = 0;             ///< points [0, splitPoint) lie below disc
  std::vector<WeightRow> rows;
  double maxRelativeResidual = 0.0;
  int nestedPointsAdded = 0;

  bool hasRow(int i) const { return !rows[static_cast<std::size_t>(i)].empty(); }
  /// Point range of row i restricted to one side of disc.
  std::pair<int, int> sideRange(int i, Side side) const;
};

/// Throws std::invalid_argument if disc is not a breakpoint; ConstructionError on failure.
DiscontinuousRuleSet buildDWQ(const Basis1D& basis, const PointLayout& layout, double disc,
                              int direction = 0, bool parallel = false);

/// Basis values at layout points: p+1 values per point starting at first[k].
struct EvaluatedLayout {
  int degree = 0;
  std::vector<int> first;
  std::vector<double> values;  ///< (p+1) per point

  EvaluatedLayout() = default;
  EvaluatedLayout(const Basis1D& basis, std::span<const double> points);
  /// Only points [begin, end) are evaluated; all values elsewhere read as zero.
  EvaluatedLayout(const Basis1D& basis, std::span<const double> points, int begin, int end);

  double value(int j, int k) const {
    const int a = j - first[static_cast<std::size_t>(k)];
    return (a >= 0 && a <= degree)
               ? values[static_cast<std::size_t>(k) * static_cast<std::size_t>(degree + 1) +
                        static_cast<std::size_t>(a)]
               : 0.0;
  }
  std::span<const double> at(int k) const {
    return std::span<const double>(values).subspan(
        static_cast<std::size_t>(k) * static_cast<std::size_t>(degree + 1),
        static_cast<std::size_t>(degree + 1));
  }
};

}  // namespace trimquad
