#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "trimquad/classification.hpp"
#include "trimquad/cut_cell.hpp"
#include "trimquad/weighted_quadrature.hpp"

namespace trimquad {

/// Coefficient c(u1,u2) of the mass integrand (pulled back geometry factor).
class CoefficientField {
 public:
  CoefficientField() = default;  // c = 1
  explicit CoefficientField(std::function<double(double, double)> f) : f_(std::move(f)) {}

  bool isUnit() const { return !f_; }
  double operator()(double u1, double u2) const { return f_ ? f_(u1, u2) : 1.0; }

 private:
  std::function<double(double, double)> f_;
};

/// c at every pair of points of two layouts, row-major in (k1, k2). A grid may cover
/// only the window [offset1, offset1+n1) x [offset2, offset2+n2) of the layouts.
struct CoefficientGrid {
  int n1 = 0;
  int n2 = 0;
  int offset1 = 0;
  int offset2 = 0;
  std::vector<double> values;

  CoefficientGrid() = default;
  CoefficientGrid(const CoefficientField& c, std::span<const double> p1, std::span<const double> p2,
                  int offset1 = 0, int offset2 = 0);

  double at(int k1, int k2) const {
    return values[static_cast<std::size_t>(k1 - offset1) * n2 + (k2 - offset2)];
  }
  /// Zero the points outside the valid region (full-layout grids only).
  void zeroOutside(const TrimConfiguration& config, const PointLayout& l1, const PointLayout& l2);
};

/// Row-compressed square matrix over the retained (non-exterior) basis functions.
class SparseMatrix {
 public:
  std::vector<int> functions;  ///< row/column -> flat tensor index
  std::vector<int> indexOf;    ///< flat tensor index -> row/column, -1 if dropped
  std::vector<int> rowStart;
  std::vector<int> columns;
  std::vector<double> values;

  int size() const { return static_cast<int>(functions.size()); }
  int nonZeros() const { return static_cast<int>(values.size()); }
  /// Entry (r,c) of the pattern or nullptr.
  double* find(int r, int c);
  double at(int r, int c) const;

  void symmetrize();
  /// ||M - M^T||_F / ||M||_F.
  double asymmetry() const;
  double frobenius() const;
  bool sameStructure(const SparseMatrix& o) const;

  Eigen::SparseMatrix<double> toEigen() const;
  Eigen::MatrixXd toDense() const;
};

/// Zero matrix on the overlap graph of the non-exterior functions.
SparseMatrix overlapPattern(const TrimConfiguration& config);

/// ||A - B||_F over a shared pattern.
double frobeniusDistance(const SparseMatrix& a, const SparseMatrix& b);

/// Dense block of one test row: entries for trials j1 in [j1, j1+n1), j2 in [j2, j2+n2).
struct RowBlock {
  int j1 = 0;
  int j2 = 0;
  int n1 = 0;
  int n2 = 0;
  std::vector<double> values;

  RowBlock() = default;
  RowBlock(const TensorBasis2D& basis, int test);
  double& operator()(int a1, int a2) { return values[static_cast<std::size_t>(a1 - j1) * n2 + (a2 - j2)]; }
  double get(int a1, int a2) const {
    return (a1 < j1 || a1 >= j1 + n1 || a2 < j2 || a2 >= j2 + n2)
               ? 0.0
               : values[static_cast<std::size_t>(a1 - j1) * n2 + (a2 - j2)];
  }
  RowBlock& operator+=(const RowBlock& o);
};

/// Write a block into row `r` of m (pattern entries outside the block become 0).
void storeRow(SparseMatrix& m, int r, const RowBlock& block, const TensorBasis2D& basis);

/// Weights of one test function in one direction, restricted to points [begin, end).
struct DirectionalRule {
  const WeightRow* weights = nullptr;
  const EvaluatedLayout* values = nullptr;
  int begin = 0;
  int end = 0;
};

enum class ContractionOrder { Direction2Inner, Direction1Inner };

/// Multiply-add counts of the two contraction stages.
struct OperationCount {
  long long inner = 0;
  long long outer = 0;
  long long total() const { return inner + outer; }
};

/// m_ij for all trials j overlapping test i by two nested one-dimensional contractions.
RowBlock sumFactorRow(const TensorBasis2D& basis, int test, const DirectionalRule& r1, const DirectionalRule& r2,
                      const CoefficientGrid& grid, ContractionOrder order = ContractionOrder::Direction2Inner,
                      OperationCount* ops = nullptr);

enum class Strategy { Reference, WQ, Hybrid, DWQ };

const char* strategyName(Strategy s);
/// Throws std::invalid_argument for unknown names.
Strategy strategyFromName(const std::string& name);
inline constexpr Strategy kAllStrategies[] = {Strategy::Reference, Strategy::WQ, Strategy::Hybrid, Strategy::DWQ};

/// Wall times (seconds) of the formation components plus point counts.
struct FormationReport {
  Strategy strategy = Strategy::Reference;
  double tWeights = 0.0;      ///< weighted-quadrature rules, evaluated layouts, coefficient grids
  double tInterior = 0.0;     ///< rows of interior functions (reference: interior elements)
  double tCutRegular = 0.0;   ///< regular support of cut functions
  double tCutElements = 0.0;  ///< cut-element contributions
  double tTotal = 0.0;

  int wqPoints[2] = {0, 0};
  int dwqRuleSets = 0;
  int dwqRows = 0;       ///< cut functions formed with discontinuous rules
  int fallbackRows = 0;  ///< ineligible cut functions formed like hybrid
  int gaussElements = 0; ///< distinct elements integrated by Gauss for cut rows
  long long gaussPoints = 0;
  long long cutPoints = 0;
};

struct FormationOptions {
  bool parallel = false;
  bool symmetrize = true;
};

/// Cut-cell quadrature for the mass matrix: geometry degree min(p, 6), 2p+1 points per
/// sub-cell direction (exact for products of basis functions on straight sub-cells).
CutCellQuadrature massCutQuadrature(const TrimConfiguration& config, bool parallel = false);

/// Form the mass matrix with one strategy. Cut quadrature generation is not timed.
std::pair<SparseMatrix, FormationReport> formWithTimings(Strategy strategy, const TrimConfiguration& config,
                                                         const CoefficientField& c, const CutCellQuadrature& cut,
                                                         FormationOptions options = {});

/// Element-wise (p+1)^2 Gauss on interior elements, cut-cell rules on cut elements.
SparseMatrix assembleGaussReference(const TrimConfiguration& config, const CoefficientField& c,
                                    const CutCellQuadrature& cut);
/// Weighted quadrature on every row with c zeroed at points outside the valid region.
/// Cut elements get no special treatment, so rows of cut functions are inexact.
SparseMatrix assembleWQ(const TrimConfiguration& config, const CoefficientField& c, const CutCellQuadrature& cut);
/// Weighted quadrature for interior functions, element-wise Gauss for cut functions.
SparseMatrix assembleHybrid(const TrimConfiguration& config, const CoefficientField& c,
                            const CutCellQuadrature& cut);
/// Discontinuous weighted quadrature on the regular box of eligible cut functions.
SparseMatrix assembleDWQ(const TrimConfiguration& config, const CoefficientField& c, const CutCellQuadrature& cut);

SparseMatrix assemble(Strategy s, const TrimConfiguration& config, const CoefficientField& c,
                      const CutCellQuadrature& cut, FormationOptions options = {});

}  // namespace trimquad
