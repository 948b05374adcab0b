#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "../support/oracles.hpp"
#include "trimquad/gauss.hpp"
#include "trimquad/weighted_quadrature.hpp"

using namespace trimquad;

namespace {

Basis1D basisOf(int p, std::vector<double> knots) { return Basis1D(KnotVector(p, std::move(knots))); }

// Oracle moment int_a^b B_i B_j du via the recursion oracle and adaptive Gauss.
double oracleMoment(const Basis1D& b, int i, int j, double a, double c) {
  const std::vector<double> U(b.knotVector().knots().begin(), b.knotVector().knots().end());
  const int p = b.degree();
  return oracle::integratePiecewise(
      [&](double u) { return oracle::bspline(U, p, i, u) * oracle::bspline(U, p, j, u); }, a, c, U);
}

// max_j |sum_{k in [k0,k1)} B_j(x_k) w_k - target_j| over trials overlapping i.
double rowResidual(const Basis1D& b, const PointLayout& layout, const WeightRow& row, int i, int k0,
                   int k1, const std::vector<double>& target) {
  const auto [j0, j1] = b.overlappingRange(i);
  double worst = 0.0;
  for (int j = j0; j <= j1; ++j) {
    double s = 0.0;
    for (int k = k0; k < k1; ++k) s += b.eval(j, layout.points[static_cast<std::size_t>(k)]) * row.at(k);
    worst = std::max(worst, std::abs(s - target[static_cast<std::size_t>(j - j0)]));
  }
  return worst;
}

}  // namespace

TEST_CASE("Gauss-Legendre closed forms") {
  const GaussRule g1 = gaussLegendre(1);
  CHECK(g1.points[0] == 0.0);
  CHECK(g1.weights[0] == doctest::Approx(2.0).epsilon(1e-15));
  const GaussRule g2 = gaussLegendre(2);
  CHECK(g2.points[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(g2.points[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(g2.weights[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g2.weights[1] == doctest::Approx(1.0).epsilon(1e-15));
  const GaussRule g5 = gaussLegendre(5);
  double s = 0.0;
  for (int k = 0; k < 5; ++k) s += g5.weights[static_cast<std::size_t>(k)] * std::pow(g5.points[static_cast<std::size_t>(k)], 8);
  CHECK(std::abs(s - 2.0 / 9.0) <= 1e-14);
  CHECK_THROWS_AS(gaussLegendre(0), std::invalid_argument);
}

TEST_CASE("Gauss-Legendre exactness, positivity and symmetry") {
  for (int n = 1; n <= 14; ++n) {
    const GaussRule g = gaussLegendre(n);
    for (int k = 0; k < n; ++k) {
      CHECK(g.weights[static_cast<std::size_t>(k)] > 0.0);
      CHECK(g.points[static_cast<std::size_t>(k)] == -g.points[static_cast<std::size_t>(n - 1 - k)]);
    }
    for (int deg = 0; deg <= 2 * n - 1; ++deg) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += g.weights[static_cast<std::size_t>(k)] * std::pow(g.points[static_cast<std::size_t>(k)], deg);
      CHECK(std::abs(s - oracle::monomialIntegral(deg, -1.0, 1.0)) <= 1e-14);
    }
  }
}

TEST_CASE("Gauss-Lobatto rules") {
  for (int n = 2; n <= 8; ++n) {
    const GaussRule g = gaussLobatto(n);
    CHECK(g.points.front() == -1.0);
    CHECK(g.points.back() == 1.0);
    for (int deg = 0; deg <= 2 * n - 3; ++deg) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += g.weights[static_cast<std::size_t>(k)] * std::pow(g.points[static_cast<std::size_t>(k)], deg);
      CHECK(std::abs(s - oracle::monomialIntegral(deg, -1.0, 1.0)) <= 1e-14);
    }
  }
  CHECK_THROWS_AS(gaussLobatto(1), std::invalid_argument);
}

TEST_CASE("weighted quadrature point placement") {
  SUBCASE("two points per interior element for maximally smooth bases") {
    for (int p = 1; p <= 6; ++p) {
      const Basis1D b = basisOf(p, oracle::uniformKnots(p, 16));
      const PointLayout layout = placeWQPoints(b);
      for (int e = p; e < b.numElements() - p; ++e) CHECK(layout.countIn(e) == 2);
      // Counting check: every test function sees at least as many points as trials.
      for (int i = 0; i < b.size(); ++i) {
        const auto [k0, k1] = layout.range(b.supportBegin(i), b.supportEnd(i));
        const auto [j0, j1] = b.overlappingRange(i);
        CHECK(k1 - k0 >= j1 - j0 + 1);
      }
    }
  }
  SUBCASE("Bezier element gets p+1 points") {
    for (int p = 1; p <= 6; ++p) {
      const PointLayout layout = placeWQPoints(basisOf(p, oracle::uniformKnots(p, 1)));
      CHECK(layout.size() == p + 1);
    }
  }
  SUBCASE("open uniform spacing never touches knots") {
    const Basis1D b = basisOf(2, {0, 0, 0, 0.3, 1, 1, 1});
    const std::vector<int> counts{3, 2};
    const PointLayout layout = uniformLayout(b, counts);
    CHECK(layout.points[0] == doctest::Approx(0.3 * 1 / 4.0));
    CHECK(layout.points[2] == doctest::Approx(0.3 * 3 / 4.0));
    CHECK(layout.points[3] == doctest::Approx(0.3 + 0.7 / 3.0));
    for (double x : layout.points) {
      for (double k : b.knotVector().knots()) CHECK(x != k);
    }
  }
  SUBCASE("total point count grows by two per element, independent of p") {
    for (int p = 1; p <= 6; ++p) {
      const int n10 = placeWQPoints(basisOf(p, oracle::uniformKnots(p, 20))).size();
      const int n20 = placeWQPoints(basisOf(p, oracle::uniformKnots(p, 40))).size();
      CHECK(n20 - n10 == 40);
    }
  }
}

TEST_CASE("exact moments") {
  const Basis1D bez = basisOf(2, {0, 0, 0, 1, 1, 1});
  CHECK(exactMoments(bez, 0)[0] == doctest::Approx(0.2).epsilon(1e-15));

  const Basis1D lin = basisOf(1, {0, 0, 1, 1});
  const auto m0 = exactMoments(lin, 0);
  const auto m1 = exactMoments(lin, 1);
  CHECK(m0[0] == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(m0[1] == doctest::Approx(1.0 / 6).epsilon(1e-15));
  CHECK(m1[0] == doctest::Approx(1.0 / 6).epsilon(1e-15));
  CHECK(m1[1] == doctest::Approx(1.0 / 3).epsilon(1e-15));

  std::mt19937_64 rng(5);
  for (int p = 1; p <= 6; ++p) {
    const Basis1D b = basisOf(p, oracle::randomKnots(rng, p, 6, p));
    for (int i = 0; i < b.size(); ++i) {
      const auto m = exactMoments(b, i);
      double sum = 0.0;
      for (double v : m) sum += v;
      CHECK(std::abs(sum - (b.supportEnd(i) - b.supportBegin(i)) / (p + 1)) <= 1e-15);
      const auto [j0, j1] = b.overlappingRange(i);
      CHECK(std::abs(m[0] - oracleMoment(b, i, j0, 0.0, 1.0)) <= 1e-14);
      CHECK(std::abs(m.back() - oracleMoment(b, i, j1, 0.0, 1.0)) <= 1e-14);
    }
  }
}

TEST_CASE("weighted quadrature rules") {
  SUBCASE("linear Bezier element with two interior points") {
    const Basis1D lin = basisOf(1, {0, 0, 1, 1});
    const WeightedRuleSet rules = buildWQRules(lin);
    CHECK(rules.layout.size() == 2);
    for (int i = 0; i < 2; ++i) {
      double s0 = 0.0, s1 = 0.0;
      for (int k = 0; k < 2; ++k) {
        s0 += lin.eval(0, rules.layout.points[static_cast<std::size_t>(k)]) * rules.rows[static_cast<std::size_t>(i)].at(k);
        s1 += lin.eval(1, rules.layout.points[static_cast<std::size_t>(k)]) * rules.rows[static_cast<std::size_t>(i)].at(k);
      }
      CHECK(s0 == doctest::Approx(i == 0 ? 1.0 / 3 : 1.0 / 6).epsilon(1e-14));
      CHECK(s1 == doctest::Approx(i == 0 ? 1.0 / 6 : 1.0 / 3).epsilon(1e-14));
    }
  }
  SUBCASE("row weights sum to the integral of the test function") {
    for (int p = 1; p <= 6; ++p) {
      const Basis1D b = basisOf(p, oracle::uniformKnots(p, 12));
      const WeightedRuleSet rules = buildWQRules(b);
      for (int i = 0; i < b.size(); ++i) {
        double s = 0.0;
        for (double w : rules.rows[static_cast<std::size_t>(i)].weights) s += w;
        CHECK(std::abs(s - (b.supportEnd(i) - b.supportBegin(i)) / (p + 1)) <= 1e-12);
      }
    }
  }
  SUBCASE("zero structure follows the support") {
    const Basis1D b = basisOf(3, oracle::uniformKnots(3, 10));
    const WeightedRuleSet rules = buildWQRules(b);
    for (int i = 0; i < b.size(); ++i) {
      const WeightRow& row = rules.rows[static_cast<std::size_t>(i)];
      for (int k = row.firstPoint; k < row.endPoint(); ++k) {
        const double x = rules.layout.points[static_cast<std::size_t>(k)];
        CHECK(x > b.supportBegin(i));
        CHECK(x < b.supportEnd(i));
      }
    }
  }
  SUBCASE("one-dimensional mass matrix equals Gauss assembly") {
    for (int p = 1; p <= 6; ++p) {
      const Basis1D b = basisOf(p, oracle::uniformKnots(p, 9));
      const WeightedRuleSet rules = buildWQRules(b);
      const EvaluatedLayout ev(b, rules.layout.points);
      Eigen::MatrixXd wq = Eigen::MatrixXd::Zero(b.size(), b.size());
      Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(b.size(), b.size());
      for (int i = 0; i < b.size(); ++i) {
        const WeightRow& row = rules.rows[static_cast<std::size_t>(i)];
        for (int k = row.firstPoint; k < row.endPoint(); ++k) {
          for (int j = 0; j < b.size(); ++j) wq(i, j) += row.at(k) * ev.value(j, k);
        }
        const auto m = exactMoments(b, i);
        const auto [j0, j1] = b.overlappingRange(i);
        for (int j = j0; j <= j1; ++j) ref(i, j) = m[static_cast<std::size_t>(j - j0)];
      }
      CHECK((wq - ref).norm() / ref.norm() <= 1e-12);
    }
  }
}

TEST_CASE("weighted quadrature exactness on uniform and mixed-multiplicity knot vectors") {
  std::mt19937_64 rng(2024);
  for (int p = 1; p <= 6; ++p) {
    for (int trial = 0; trial < 6; ++trial) {
      const auto U = trial == 0 ? oracle::uniformKnots(p, 8) : oracle::randomKnots(rng, p, 8, p + (trial % 2));
      const Basis1D b = basisOf(p, U);
      const WeightedRuleSet rules = buildWQRules(b);
      CHECK(rules.maxRelativeResidual <= 1e-12);
      for (int i = 0; i < b.size(); ++i) {
        const WeightRow& row = rules.rows[static_cast<std::size_t>(i)];
        const auto m = exactMoments(b, i);
        CHECK(rowResidual(b, rules.layout, row, i, row.firstPoint, row.endPoint(), m) <= 1e-12);
      }
    }
  }
}

TEST_CASE("discontinuous weighted quadrature") {
  for (int p = 1; p <= 6; ++p) {
    const Basis1D b = basisOf(p, oracle::uniformKnots(p, 10));
    const WeightedRuleSet base = buildWQRules(b);
    const double disc = 0.4;
    const DiscontinuousRuleSet dwq = buildDWQ(b, base.layout, disc);
    CHECK(dwq.layout.contains(base.layout));
    if (p >= 2) CHECK(dwq.layout.size() > base.layout.size());
    CHECK(dwq.maxRelativeResidual <= 1e-12);
    for (int i = 0; i < b.size(); ++i) {
      const bool inside = b.supportBegin(i) < disc && b.supportEnd(i) > disc;
      CHECK(dwq.hasRow(i) == inside);
      if (!inside) continue;
      const auto [j0, j1] = b.overlappingRange(i);
      std::vector<double> below, above, full;
      for (int j = j0; j <= j1; ++j) {
        below.push_back(oracleMoment(b, i, j, 0.0, disc));
        above.push_back(oracleMoment(b, i, j, disc, 1.0));
        full.push_back(below.back() + above.back());
      }
      const WeightRow& row = dwq.rows[static_cast<std::size_t>(i)];
      const auto [b0, b1] = dwq.sideRange(i, Side::Below);
      const auto [a0, a1] = dwq.sideRange(i, Side::Above);
      CHECK(rowResidual(b, dwq.layout, row, i, b0, b1, below) <= 1e-12);
      CHECK(rowResidual(b, dwq.layout, row, i, a0, a1, above) <= 1e-12);
      CHECK(rowResidual(b, dwq.layout, row, i, row.firstPoint, row.endPoint(), full) <= 1e-12);
    }
  }
  const Basis1D b = basisOf(2, oracle::uniformKnots(2, 5));
  CHECK_THROWS_AS(buildDWQ(b, placeWQPoints(b), 0.5), std::invalid_argument);
  CHECK_THROWS_AS(buildDWQ(b, placeWQPoints(b), 0.0), std::invalid_argument);

  // A breakpoint that is already C^-1 has no straddling supports.
  const Basis1D split = basisOf(2, {0, 0, 0, 0.5, 0.5, 0.5, 1, 1, 1});
  const DiscontinuousRuleSet none = buildDWQ(split, placeWQPoints(split), 0.5);
  for (int i = 0; i < split.size(); ++i) CHECK_FALSE(none.hasRow(i));
}
