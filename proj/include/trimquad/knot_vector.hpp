#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace trimquad {

/// Absolute tolerance used to decide that two knot values coincide.
inline constexpr double kKnotTolerance = 1e-12;

/// Highest polynomial degree supported by the fixed-size evaluation buffers.
inline constexpr int kMaxDegree = 12;

/// Open (clamped) knot vector of degree p.
///
/// Invariants checked on construction: knots are non-decreasing, the first and
/// last value have multiplicity exactly p+1 and no interior value exceeds p+1.
class KnotVector {
 public:
  KnotVector(int degree, std::vector<double> knots);

  /// Clamped uniform knot vector with `elements` equal spans on [a,b].
  static KnotVector uniform(int degree, int elements, double a = 0.0, double b = 1.0);

  int degree() const noexcept { return degree_; }
  std::span<const double> knots() const noexcept { return knots_; }
  std::size_t size() const noexcept { return knots_.size(); }
  double operator[](std::size_t i) const { return knots_[i]; }
  double front() const { return knots_.front(); }
  double back() const { return knots_.back(); }

  /// Number of knots equal to u within kKnotTolerance.
  int multiplicity(double u) const;
  /// Distinct knot values (element boundaries).
  std::vector<double> breakpoints() const;

  friend bool operator==(const KnotVector&, const KnotVector&) = default;

 private:
  int degree_;
  std::vector<double> knots_;
};

}  // namespace trimquad
