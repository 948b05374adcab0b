#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "trimquad/knot_vector.hpp"

namespace trimquad {

/// Values of the p+1 B-splines that are non-zero on one knot span.
struct NonzeroValues {
  int first = 0;  ///< index of the first non-zero function
  std::array<double, kMaxDegree + 1> values{};
};

/// Element (non-empty knot span) of a uni-variate basis.
struct Element {
  double a = 0.0;
  double b = 0.0;
  int span = 0;  ///< knot span index l with knots[l] = a < knots[l+1] = b
};

/// Uni-variate B-spline basis {B_{i,p}}, i = 0..n-1, defined by an open knot vector.
class Basis1D {
 public:
  explicit Basis1D(KnotVector kv);

  const KnotVector& knotVector() const noexcept { return kv_; }
  int degree() const noexcept { return kv_.degree(); }
  int size() const noexcept { return n_; }
  double lower() const { return kv_.front(); }
  double upper() const { return kv_.back(); }

  /// Span index l with u in [knots[l], knots[l+1]); the last non-empty span for u = upper().
  int findSpan(double u) const;

  /// Cox-de Boor evaluation of the p+1 functions that are non-zero at u.
  NonzeroValues evalNonzero(double u) const;
  /// Same as evalNonzero but writes into `out` (size >= p+1) and returns the first index.
  int evalNonzero(double u, std::span<double> out) const;
  /// Value of a single function B_i(u); exactly zero outside its support.
  double eval(int i, double u) const;

  double supportBegin(int i) const { return kv_[static_cast<std::size_t>(i)]; }
  double supportEnd(int i) const { return kv_[static_cast<std::size_t>(i + degree() + 1)]; }
  /// Whether supp(B_i) and supp(B_j) overlap on a set of positive length.
  bool overlaps(int i, int j) const;
  /// Inclusive range of trial indices whose support overlaps supp(B_i).
  std::pair<int, int> overlappingRange(int i) const;

  const std::vector<Element>& elements() const noexcept { return elements_; }
  int numElements() const noexcept { return static_cast<int>(elements_.size()); }
  /// Element containing u (right-closed at the upper end).
  int elementOf(double u) const;
  /// Half-open range [first, last) of elements covered by supp(B_i).
  std::pair<int, int> supportElements(int i) const;
  /// First function that is non-zero on element e; p+1 consecutive functions follow.
  int firstFunctionOn(int e) const { return elements_[static_cast<std::size_t>(e)].span - degree(); }

  /// Index of the breakpoint equal to u within kKnotTolerance, or -1.
  int breakpointIndex(double u) const;

  friend bool operator==(const Basis1D& a, const Basis1D& b) { return a.kv_ == b.kv_; }

 private:
  KnotVector kv_;
  int n_;
  std::vector<Element> elements_;
  std::vector<double> breakpoints_;
  std::vector<int> elementOfKnot_;  // breakpoint index of each knot
};

/// Tensor-product basis B_(i1,i2)(u1,u2) = B_i1(u1) * B_i2(u2).
class TensorBasis2D {
 public:
  TensorBasis2D(Basis1D u, Basis1D v) : dir_{std::move(u), std::move(v)} {}

  const Basis1D& dir(int d) const { return dir_[static_cast<std::size_t>(d)]; }
  int size() const { return dir_[0].size() * dir_[1].size(); }
  int numElements() const { return dir_[0].numElements() * dir_[1].numElements(); }

  int flat(int i1, int i2) const { return i1 * dir_[1].size() + i2; }
  std::array<int, 2> split(int flat) const { return {flat / dir_[1].size(), flat % dir_[1].size()}; }
  int flatElement(int e1, int e2) const { return e1 * dir_[1].numElements() + e2; }
  std::array<int, 2> splitElement(int e) const {
    return {e / dir_[1].numElements(), e % dir_[1].numElements()};
  }

  double eval(int i1, int i2, double u1, double u2) const {
    return dir_[0].eval(i1, u1) * dir_[1].eval(i2, u2);
  }

 private:
  std::array<Basis1D, 2> dir_;
};

}  // namespace trimquad
