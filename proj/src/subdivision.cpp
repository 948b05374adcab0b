#include "trimquad/subdivision.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "trimquad/errors.hpp"

namespace trimquad {

namespace {

using SparseRM = Eigen::SparseMatrix<double, Eigen::RowMajor>;

SparseRM identity(int n) {
  SparseRM I(n, n);
  I.setIdentity();
  return I;
}

}  // namespace

std::pair<Basis1D, SubdivisionMatrix> insertKnot(const Basis1D& basis, double ubar) {
  const KnotVector& kv = basis.knotVector();
  const int p = kv.degree();
  const int n = basis.size();
  if (ubar < basis.lower() - kKnotTolerance || ubar > basis.upper() + kKnotTolerance) {
    throw DomainError("insertKnot: knot outside the parametric domain");
  }
  for (double k : kv.knots()) {
    if (std::abs(k - ubar) <= kKnotTolerance) {
      ubar = k;
      break;
    }
  }
  if (kv.multiplicity(ubar) + 1 > p + 1) {
    throw std::invalid_argument("insertKnot: multiplicity would exceed p+1");
  }
  // l with ubar in [u_l, u_{l+1}); at the upper end the last non-empty span.
  const int l = basis.findSpan(ubar);
  const auto U = kv.knots();

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(2 * (n + 1)));
  for (int k = 0; k <= n; ++k) {
    double alpha;
    if (k <= l - p) {
      alpha = 1.0;
    } else if (k >= l + 1) {
      alpha = 0.0;
    } else {
      alpha = (ubar - U[k]) / (U[k + p] - U[k]);
    }
    if (alpha != 0.0 && k < n) trips.emplace_back(k, k, alpha);
    if (alpha != 1.0 && k >= 1) trips.emplace_back(k, k - 1, 1.0 - alpha);
  }
  SparseRM S(n + 1, n);
  S.setFromTriplets(trips.begin(), trips.end());

  std::vector<double> refined(U.begin(), U.end());
  refined.insert(refined.begin() + (l + 1), ubar);
  Basis1D fine{KnotVector(p, std::move(refined))};
  return {fine, SubdivisionMatrix{std::move(S), basis, fine}};
}

SubdivisionMatrix subdivisionMatrixTo(const Basis1D& basis, std::span<const double> targetKnots) {
  const auto src = basis.knotVector().knots();
  std::vector<double> target(targetKnots.begin(), targetKnots.end());
  std::sort(target.begin(), target.end());

  // Multiset difference target \ source with knot tolerance.
  std::vector<double> inserts;
  std::size_t s = 0;
  for (double t : target) {
    if (s < src.size() && std::abs(src[s] - t) <= kKnotTolerance) {
      ++s;
    } else if (s < src.size() && src[s] < t) {
      throw std::invalid_argument("subdivisionMatrixTo: target knots are not nested");
    } else {
      inserts.push_back(t);
    }
  }
  if (s != src.size()) {
    throw std::invalid_argument("subdivisionMatrixTo: target knots are not nested");
  }

  SparseRM S = identity(basis.size());
  Basis1D current = basis;
  for (double u : inserts) {
    auto [fine, step] = insertKnot(current, u);
    S = SparseRM(step.entries * S);
    current = std::move(fine);
  }
  S.prune(0.0);
  return SubdivisionMatrix{std::move(S), basis, std::move(current)};
}

SubdivisionMatrix makeDiscontinuous(const Basis1D& basis, double u) {
  const int bp = basis.breakpointIndex(u);
  if (bp < 0) throw std::invalid_argument("makeDiscontinuous: location is not a breakpoint of the basis");
  const KnotVector& kv = basis.knotVector();
  const int p = kv.degree();
  const int n = basis.size();
  const int s = kv.multiplicity(u);
  const int r = p + 1 - s;
  if (r == 0) return SubdivisionMatrix{identity(n), basis, basis};
  const auto U = kv.knots();
  // Last knot index equal to u.
  int k = 0;
  while (k + 1 < static_cast<int>(U.size()) && U[k + 1] <= u + kKnotTolerance) ++k;
  u = U[k];

  // Repeated insertion of one knot: only coarse functions k-p..k-s are mixed, so the
  // blending rows are kept as small dense vectors over that window.
  const int w0 = k - p, width = p - s + 1;
  std::vector<std::vector<double>> R(static_cast<std::size_t>(width), std::vector<double>(width, 0.0));
  for (int i = 0; i < width; ++i) R[i][i] = 1.0;
  std::vector<std::vector<double>> mid(static_cast<std::size_t>(n + r));  // rows k-p+1 .. k+r-s-1
  int L = w0;
  // With s + r = p + 1 the last step would only repeat row k-s+1, so it is skipped.
  for (int j = 1; j <= std::min(r, p - s); ++j) {
    L = k - p + j;
    for (int i = 0; i <= p - j - s; ++i) {
      const double alpha = (u - U[L + i]) / (U[i + k + 1] - U[L + i]);
      for (int c = 0; c < width; ++c) R[i][c] = alpha * R[i + 1][c] + (1.0 - alpha) * R[i][c];
    }
    mid[L] = R[0];
    mid[k + r - j - s] = R[p - j - s];
  }
  for (int i = L + 1; i < k - s; ++i) mid[i] = R[i - L];

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(n + r + width * width));
  for (int i = 0; i < n + r; ++i) {
    if (i <= k - p) {
      trips.emplace_back(i, i, 1.0);
    } else if (i >= k - s + r) {
      trips.emplace_back(i, i - r, 1.0);
    } else {
      for (int c = 0; c < width; ++c) {
        if (mid[i][c] != 0.0) trips.emplace_back(i, w0 + c, mid[i][c]);
      }
    }
  }
  SparseRM S(n + r, n);
  S.setFromTriplets(trips.begin(), trips.end());

  std::vector<double> refined(U.begin(), U.end());
  refined.insert(refined.begin() + (k + 1), static_cast<std::size_t>(r), u);
  return SubdivisionMatrix{std::move(S), basis, Basis1D(KnotVector(p, std::move(refined)))};
}

}  // namespace trimquad
