#include "trimquad/knot_vector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace trimquad {

KnotVector::KnotVector(int degree, std::vector<double> knots)
    : degree_(degree), knots_(std::move(knots)) {
  if (degree_ < 0 || degree_ > kMaxDegree) {
    throw std::invalid_argument("knot vector: degree must lie in [0, " +
                                std::to_string(kMaxDegree) + "]");
  }
  const auto p1 = static_cast<std::size_t>(degree_ + 1);
  if (knots_.size() < 2 * p1) {
    throw std::invalid_argument("knot vector: needs at least 2(p+1) knots");
  }
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    if (!(knots_[i] <= knots_[i + 1])) {
      throw std::invalid_argument("knot vector: knots must be non-decreasing");
    }
  }
  if (!(knots_.front() < knots_.back())) {
    throw std::invalid_argument("knot vector: empty parametric domain");
  }
  // Run lengths of (numerically) equal knots.
  std::vector<int> runs;
  for (std::size_t i = 0; i < knots_.size();) {
    std::size_t j = i;
    while (j < knots_.size() && knots_[j] - knots_[i] <= kKnotTolerance) ++j;
    runs.push_back(static_cast<int>(j - i));
    i = j;
  }
  if (runs.front() != degree_ + 1 || runs.back() != degree_ + 1) {
    throw std::invalid_argument("knot vector: end knots must have multiplicity p+1 (open knot vector)");
  }
  if (std::any_of(runs.begin(), runs.end(), [&](int m) { return m > degree_ + 1; })) {
    throw std::invalid_argument("knot vector: interior multiplicity exceeds p+1");
  }
}

KnotVector KnotVector::uniform(int degree, int elements, double a, double b) {
  if (elements < 1) throw std::invalid_argument("knot vector: need at least one element");
  std::vector<double> k;
  k.reserve(static_cast<std::size_t>(elements + 2 * degree + 1));
  for (int i = 0; i < degree; ++i) k.push_back(a);
  for (int e = 0; e <= elements; ++e) {
    k.push_back(e == elements ? b : a + (b - a) * static_cast<double>(e) / elements);
  }
  for (int i = 0; i < degree; ++i) k.push_back(b);
  return KnotVector(degree, std::move(k));
}

int KnotVector::multiplicity(double u) const {
  return static_cast<int>(std::count_if(knots_.begin(), knots_.end(),
                                        [u](double k) { return std::abs(k - u) <= kKnotTolerance; }));
}

std::vector<double> KnotVector::breakpoints() const {
  std::vector<double> bp;
  for (double k : knots_) {
    if (bp.empty() || k - bp.back() > kKnotTolerance) bp.push_back(k);
  }
  return bp;
}

}  // namespace trimquad
