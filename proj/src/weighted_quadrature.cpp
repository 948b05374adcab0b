#include "trimquad/weighted_quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>

#include "trimquad/errors.hpp"
#include "trimquad/gauss.hpp"

namespace trimquad {

namespace {

constexpr double kResidualTolerance = 1e-12;
constexpr int kMaxEnrichmentRounds = 5;

struct RowSolution {
  WeightRow row;
  double residual = std::numeric_limits<double>::infinity();
};

RowSolution solveMomentRow(const Basis1D& basis, const PointLayout& layout,
                           const EvaluatedLayout& ev, int i) {
  const auto [k0, k1] = layout.range(basis.supportBegin(i), basis.supportEnd(i));
  const auto [j0, j1] = basis.overlappingRange(i);
  const std::vector<double> moments = exactMoments(basis, i);
  RowSolution sol;
  sol.row.firstPoint = k0;
  const int nt = j1 - j0 + 1;
  const int np = k1 - k0;
  if (np <= 0) return sol;

  Eigen::MatrixXd A(nt, np);
  for (int j = j0; j <= j1; ++j) {
    for (int k = k0; k < k1; ++k) A(j - j0, k - k0) = ev.value(j, k);
  }
  const Eigen::Map<const Eigen::VectorXd> b(moments.data(), nt);
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
  const Eigen::VectorXd w = cod.solve(b);
  sol.residual = (A * w - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff();
  sol.row.weights.assign(w.data(), w.data() + np);
  return sol;
}

std::vector<std::vector<double>> pointsPerElement(const PointLayout& layout) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(layout.numElements()));
  for (int e = 0; e < layout.numElements(); ++e) {
    const auto pts = layout.elementPoints(e);
    out[static_cast<std::size_t>(e)].assign(pts.begin(), pts.end());
  }
  return out;
}

// Adds `extra` points between the existing ones of [a,b]; each new point goes to the
// gap whose current spacing is largest, then every gap is filled uniformly.
void addNestedPoints(std::vector<double>& pts, double a, double b, int extra) {
  std::vector<double> ends;
  ends.reserve(pts.size() + 2);
  ends.push_back(a);
  ends.insert(ends.end(), pts.begin(), pts.end());
  ends.push_back(b);
  const std::size_t gaps = ends.size() - 1;
  std::vector<int> add(gaps, 0);
  for (int n = 0; n < extra; ++n) {
    std::size_t best = 0;
    double bestSpacing = -1.0;
    for (std::size_t g = 0; g < gaps; ++g) {
      const double spacing = (ends[g + 1] - ends[g]) / (add[g] + 1);
      if (spacing > bestSpacing * (1.0 + 1e-12)) {
        bestSpacing = spacing;
        best = g;
      }
    }
    ++add[best];
  }
  for (std::size_t g = 0; g < gaps; ++g) {
    for (int m = 1; m <= add[g]; ++m) {
      pts.push_back(ends[g] + (ends[g + 1] - ends[g]) * m / (add[g] + 1));
    }
  }
  std::sort(pts.begin(), pts.end());
}

int leastCoveredElement(const Basis1D& basis, const PointLayout& layout, int i) {
  const auto [e0, e1] = basis.supportElements(i);
  int best = e0;
  for (int e = e0; e < e1; ++e) {
    if (layout.countIn(e) < layout.countIn(best)) best = e;
  }
  return best;
}

}  // namespace

std::pair<int, int> PointLayout::range(double a, double b) const {
  const auto lo = std::upper_bound(points.begin(), points.end(), a);
  const auto hi = std::lower_bound(points.begin(), points.end(), b);
  const int first = static_cast<int>(lo - points.begin());
  return {first, std::max(first, static_cast<int>(hi - points.begin()))};
}

bool PointLayout::contains(const PointLayout& other, double tol) const {
  for (double x : other.points) {
    const auto it = std::lower_bound(points.begin(), points.end(), x - tol);
    if (it == points.end() || std::abs(*it - x) > tol) return false;
  }
  return true;
}

PointLayout PointLayout::fromElementPoints(const std::vector<std::vector<double>>& perElement) {
  PointLayout layout;
  layout.elementOffsets.push_back(0);
  for (std::size_t e = 0; e < perElement.size(); ++e) {
    for (double x : perElement[e]) {
      layout.points.push_back(x);
      layout.elementOfPoint.push_back(static_cast<int>(e));
    }
    layout.elementOffsets.push_back(static_cast<int>(layout.points.size()));
  }
  return layout;
}

std::vector<int> requiredPointCounts(const Basis1D& basis) {
  std::vector<int> counts(static_cast<std::size_t>(basis.numElements()), 0);
  for (int i = 0; i < basis.size(); ++i) {
    const auto [j0, j1] = basis.overlappingRange(i);
    const auto [e0, e1] = basis.supportElements(i);
    const int trials = j1 - j0 + 1;
    const int elems = e1 - e0;
    const int need = (trials + elems - 1) / elems;
    for (int e = e0; e < e1; ++e) {
      counts[static_cast<std::size_t>(e)] = std::max(counts[static_cast<std::size_t>(e)], need);
    }
  }
  return counts;
}

PointLayout uniformLayout(const Basis1D& basis, std::span<const int> counts) {
  std::vector<std::vector<double>> per(static_cast<std::size_t>(basis.numElements()));
  for (int e = 0; e < basis.numElements(); ++e) {
    const Element& el = basis.elements()[static_cast<std::size_t>(e)];
    const int n = counts[static_cast<std::size_t>(e)];
    for (int k = 1; k <= n; ++k) {
      per[static_cast<std::size_t>(e)].push_back(el.a + (el.b - el.a) * k / (n + 1));
    }
  }
  return PointLayout::fromElementPoints(per);
}

PointLayout placeWQPoints(const Basis1D& basis) {
  const std::vector<int> counts = requiredPointCounts(basis);
  return uniformLayout(basis, counts);
}

std::vector<double> exactMoments(const Basis1D& basis, int i) {
  const int p = basis.degree();
  const auto [j0, j1] = basis.overlappingRange(i);
  const auto [e0, e1] = basis.supportElements(i);
  std::vector<double> b(static_cast<std::size_t>(j1 - j0 + 1), 0.0);
  const GaussRule ref = gaussLegendre(p + 1);
  for (int e = e0; e < e1; ++e) {
    const Element& el = basis.elements()[static_cast<std::size_t>(e)];
    const GaussRule g = ref.mapped(el.a, el.b);
    for (int q = 0; q < g.size(); ++q) {
      const NonzeroValues nz = basis.evalNonzero(g.points[static_cast<std::size_t>(q)]);
      const double bi = nz.values[static_cast<std::size_t>(i - nz.first)];
      for (int a = 0; a <= p; ++a) {
        const int j = nz.first + a;
        if (j < j0 || j > j1) continue;
        b[static_cast<std::size_t>(j - j0)] +=
            g.weights[static_cast<std::size_t>(q)] * bi * nz.values[static_cast<std::size_t>(a)];
      }
    }
  }
  return b;
}

EvaluatedLayout::EvaluatedLayout(const Basis1D& basis, std::span<const double> points)
    : EvaluatedLayout(basis, points, 0, static_cast<int>(points.size())) {}

EvaluatedLayout::EvaluatedLayout(const Basis1D& basis, std::span<const double> points, int begin, int end)
    : degree(basis.degree()),
      first(points.size(), -2 * (basis.degree() + 1)),
      values(points.size() * static_cast<std::size_t>(basis.degree() + 1), 0.0) {
  const auto stride = static_cast<std::size_t>(degree + 1);
  for (auto k = static_cast<std::size_t>(std::max(begin, 0)); k < std::min(points.size(), static_cast<std::size_t>(end));
       ++k) {
    first[k] = basis.evalNonzero(points[k], std::span<double>(values).subspan(k * stride, stride));
  }
}

WeightedRuleSet computeWQRules(const Basis1D& basis, PointLayout layout, int direction,
                               bool parallel) {
  const int n = basis.size();
  WeightedRuleSet set{basis, std::move(layout), std::vector<WeightRow>(static_cast<std::size_t>(n)),
                      direction, 0.0, 0};
  for (int round = 0;; ++round) {
    const EvaluatedLayout ev(basis, set.layout.points);
    std::vector<double> residual(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int i = 0; i < n; ++i) {
      RowSolution sol = solveMomentRow(basis, set.layout, ev, i);
      set.rows[static_cast<std::size_t>(i)] = std::move(sol.row);
      residual[static_cast<std::size_t>(i)] = sol.residual;
    }
    std::set<int> enrich;
    int firstFailing = -1;
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = residual[static_cast<std::size_t>(i)];
      worst = std::max(worst, r);
      if (!(r <= kResidualTolerance)) {
        if (firstFailing < 0) firstFailing = i;
        enrich.insert(leastCoveredElement(basis, set.layout, i));
      }
    }
    set.maxRelativeResidual = worst;
    if (enrich.empty()) return set;
    if (round == kMaxEnrichmentRounds) {
      throw ConstructionError("weighted quadrature: moment system of test function " +
                                  std::to_string(firstFailing) + " not satisfied (residual " +
                                  std::to_string(residual[static_cast<std::size_t>(firstFailing)]) + ")",
                              firstFailing);
    }
    std::vector<int> counts(static_cast<std::size_t>(set.layout.numElements()));
    for (int e = 0; e < set.layout.numElements(); ++e) counts[static_cast<std::size_t>(e)] = set.layout.countIn(e);
    for (int e : enrich) ++counts[static_cast<std::size_t>(e)];
    set.layout = uniformLayout(basis, counts);
    ++set.enrichmentRounds;
  }
}

WeightedRuleSet buildWQRules(const Basis1D& basis, int direction, bool parallel) {
  return computeWQRules(basis, placeWQPoints(basis), direction, parallel);
}

std::pair<int, int> DiscontinuousRuleSet::sideRange(int i, Side side) const {
  const WeightRow& row = rows[static_cast<std::size_t>(i)];
  if (side == Side::Below) return {row.firstPoint, std::min(row.endPoint(), splitPoint)};
  return {std::max(row.firstPoint, splitPoint), row.endPoint()};
}

DiscontinuousRuleSet buildDWQ(const Basis1D& basis, const PointLayout& layout, double disc,
                              int direction, bool parallel) {
  const int bp = basis.breakpointIndex(disc);
  if (bp <= 0 || bp >= basis.numElements()) {
    throw std::invalid_argument("buildDWQ: location " + std::to_string(disc) +
                                " is not an interior breakpoint");
  }
  disc = basis.elements()[static_cast<std::size_t>(bp)].a;

  DiscontinuousRuleSet set{basis, disc, direction, makeDiscontinuous(basis, disc),
                           PointLayout{}, 0, {}, 0.0, 0};
  const Basis1D& refined = set.subdivision.target;
  const auto& S = set.subdivision.entries;

  // Original test functions whose support has disc in its interior, and the
  // refined functions they are combined from.
  std::vector<int> tests;
  for (int i = 0; i < basis.size(); ++i) {
    if (basis.supportBegin(i) < disc - kKnotTolerance && basis.supportEnd(i) > disc + kKnotTolerance) {
      tests.push_back(i);
    }
  }
  std::vector<std::vector<std::pair<int, double>>> combination(static_cast<std::size_t>(basis.size()));
  std::set<int> neededSet;
  for (int k = 0; k < S.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(S, k); it; ++it) {
      const int i = static_cast<int>(it.col());
      if (std::binary_search(tests.begin(), tests.end(), i)) {
        combination[static_cast<std::size_t>(i)].emplace_back(k, it.value());
        neededSet.insert(k);
      }
    }
  }
  const std::vector<int> needed(neededSet.begin(), neededSet.end());
  if (needed.empty()) {  // already C^-1 at disc: nothing straddles it
    set.layout = layout;
    set.splitPoint = set.layout.range(basis.lower() - 1.0, disc).second;
    set.rows.assign(static_cast<std::size_t>(basis.size()), WeightRow{});
    return set;
  }

  std::vector<std::vector<double>> per = pointsPerElement(layout);
  const std::vector<int> required = requiredPointCounts(refined);
  for (int e = 0; e < basis.numElements(); ++e) {
    auto& pts = per[static_cast<std::size_t>(e)];
    const int extra = required[static_cast<std::size_t>(e)] - static_cast<int>(pts.size());
    if (extra > 0) {
      const Element& el = basis.elements()[static_cast<std::size_t>(e)];
      addNestedPoints(pts, el.a, el.b, extra);
      set.nestedPointsAdded += extra;
    }
  }

  std::vector<WeightRow> refinedRows(static_cast<std::size_t>(refined.size()));
  for (int round = 0;; ++round) {
    set.layout = PointLayout::fromElementPoints(per);
    const auto [w0, w1] =
        set.layout.range(refined.supportBegin(needed.front()), refined.supportEnd(needed.back()));
    const EvaluatedLayout ev(refined, set.layout.points, w0, w1);
    std::vector<double> residual(needed.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (std::size_t m = 0; m < needed.size(); ++m) {
      RowSolution sol = solveMomentRow(refined, set.layout, ev, needed[m]);
      refinedRows[static_cast<std::size_t>(needed[m])] = std::move(sol.row);
      residual[m] = sol.residual;
    }
    std::set<int> enrich;
    int firstFailing = -1;
    double worst = 0.0;
    for (std::size_t m = 0; m < needed.size(); ++m) {
      worst = std::max(worst, residual[m]);
      if (!(residual[m] <= kResidualTolerance)) {
        if (firstFailing < 0) firstFailing = needed[m];
        enrich.insert(leastCoveredElement(refined, set.layout, needed[m]));
      }
    }
    set.maxRelativeResidual = worst;
    if (enrich.empty()) break;
    if (round == kMaxEnrichmentRounds) {
      throw ConstructionError("discontinuous weighted quadrature: refined test function " +
                                  std::to_string(firstFailing) + " not satisfied at disc " +
                                  std::to_string(disc),
                              firstFailing);
    }
    for (int e : enrich) {
      const Element& el = basis.elements()[static_cast<std::size_t>(e)];
      addNestedPoints(per[static_cast<std::size_t>(e)], el.a, el.b, 1);
      ++set.nestedPointsAdded;
    }
  }

  set.splitPoint = set.layout.range(basis.lower() - 1.0, disc).second;
  set.rows.assign(static_cast<std::size_t>(basis.size()), WeightRow{});
  for (int i : tests) {
    const auto& combo = combination[static_cast<std::size_t>(i)];
    int lo = std::numeric_limits<int>::max();
    int hi = std::numeric_limits<int>::min();
    for (const auto& [k, s] : combo) {
      lo = std::min(lo, refinedRows[static_cast<std::size_t>(k)].firstPoint);
      hi = std::max(hi, refinedRows[static_cast<std::size_t>(k)].endPoint());
    }
    WeightRow row{lo, std::vector<double>(static_cast<std::size_t>(hi - lo), 0.0)};
    for (const auto& [k, s] : combo) {
      const WeightRow& r = refinedRows[static_cast<std::size_t>(k)];
      for (int q = r.firstPoint; q < r.endPoint(); ++q) {
        row.weights[static_cast<std::size_t>(q - lo)] += s * r.weights[static_cast<std::size_t>(q - r.firstPoint)];
      }
    }
    set.rows[static_cast<std::size_t>(i)] = std::move(row);
  }
  return set;
}

}  // namespace trimquad
