#include "trimquad/basis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "trimquad/errors.hpp"

namespace trimquad {

Basis1D::Basis1D(KnotVector kv)
    : kv_(std::move(kv)), n_(static_cast<int>(kv_.size()) - kv_.degree() - 1) {
  breakpoints_ = kv_.breakpoints();
  elementOfKnot_.resize(kv_.size());
  std::size_t b = 0;
  for (std::size_t k = 0; k < kv_.size(); ++k) {
    while (b + 1 < breakpoints_.size() && kv_[k] - breakpoints_[b] > kKnotTolerance) ++b;
    elementOfKnot_[k] = static_cast<int>(b);
  }
  for (std::size_t l = 0; l + 1 < kv_.size(); ++l) {
    if (kv_[l + 1] - kv_[l] > kKnotTolerance) {
      elements_.push_back({kv_[l], kv_[l + 1], static_cast<int>(l)});
    }
  }
}

int Basis1D::findSpan(double u) const {
  const double lo = lower();
  const double hi = upper();
  if (!(u >= lo - kKnotTolerance && u <= hi + kKnotTolerance)) {
    throw DomainError("findSpan: u = " + std::to_string(u) + " outside [" + std::to_string(lo) +
                      ", " + std::to_string(hi) + "]");
  }
  if (u >= hi) return elements_.back().span;
  if (u <= lo) return elements_.front().span;
  const auto knots = kv_.knots();
  // Largest l with knots[l] <= u.
  const auto it = std::upper_bound(knots.begin(), knots.end(), u);
  return static_cast<int>(it - knots.begin()) - 1;
}

int Basis1D::evalNonzero(double u, std::span<double> out) const {
  const int p = degree();
  const int span = findSpan(u);
  u = std::clamp(u, lower(), upper());
  const auto U = kv_.knots();
  std::array<double, kMaxDegree + 1> left{};
  std::array<double, kMaxDegree + 1> right{};
  out[0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = u - U[span + 1 - j];
    right[j] = U[span + j] - u;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = out[r] / (right[r + 1] + left[j - r]);
      out[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    out[j] = saved;
  }
  return span - p;
}

NonzeroValues Basis1D::evalNonzero(double u) const {
  NonzeroValues nz;
  nz.first = evalNonzero(u, nz.values);
  return nz;
}

double Basis1D::eval(int i, double u) const {
  if (i < 0 || i >= n_) return 0.0;
  if (u < supportBegin(i) || u > supportEnd(i)) return 0.0;
  const NonzeroValues nz = evalNonzero(u);
  const int k = i - nz.first;
  return (k >= 0 && k <= degree()) ? nz.values[static_cast<std::size_t>(k)] : 0.0;
}

bool Basis1D::overlaps(int i, int j) const {
  const double lo = std::max(supportBegin(i), supportBegin(j));
  const double hi = std::min(supportEnd(i), supportEnd(j));
  return hi - lo > kKnotTolerance;
}

std::pair<int, int> Basis1D::overlappingRange(int i) const {
  const int p = degree();
  int first = std::max(0, i - p);
  int last = std::min(n_ - 1, i + p);
  while (first < i && !overlaps(i, first)) ++first;
  while (last > i && !overlaps(i, last)) --last;
  return {first, last};
}

int Basis1D::elementOf(double u) const {
  const int span = findSpan(u);
  const auto it = std::lower_bound(elements_.begin(), elements_.end(), span,
                                   [](const Element& e, int s) { return e.span < s; });
  return static_cast<int>(it - elements_.begin());
}

std::pair<int, int> Basis1D::supportElements(int i) const {
  const auto p = static_cast<std::size_t>(degree());
  const auto ui = static_cast<std::size_t>(i);
  return {elementOfKnot_[ui], elementOfKnot_[ui + p + 1]};
}

int Basis1D::breakpointIndex(double u) const {
  const auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), u - kKnotTolerance);
  if (it != breakpoints_.end() && std::abs(*it - u) <= kKnotTolerance) {
    return static_cast<int>(it - breakpoints_.begin());
  }
  return -1;
}

}  // namespace trimquad
