#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <random>
#include <set>
#include <vector>

#include "../support/oracles.hpp"
#include "trimquad/classification.hpp"
#include "trimquad/cut_cell.hpp"
#include "trimquad/errors.hpp"

using namespace trimquad;

template <>
struct doctest::StringMaker<Location> {
  static doctest::String convert(Location l) { return locationName(l); }
};

namespace {

Basis1D uniformBasis(int p, int n) { return Basis1D(KnotVector(p, oracle::uniformKnots(p, n))); }
TensorBasis2D uniformTensor(int p, int n) { return TensorBasis2D(uniformBasis(p, n), uniformBasis(p, n)); }

// Cubic in explicit Bernstein form, independent of the library's evaluation.
std::pair<double, double> cornerCurve(double t) {
  const double P[4][2] = {{1.0, 0.33}, {0.75, 0.45}, {0.6, 0.85}, {0.31, 1.0}};
  const double b[4] = {(1 - t) * (1 - t) * (1 - t), 3 * t * (1 - t) * (1 - t), 3 * t * t * (1 - t), t * t * t};
  double x = 0, y = 0;
  for (int k = 0; k < 4; ++k) {
    x += b[k] * P[k][0];
    y += b[k] * P[k][1];
  }
  return {x, y};
}

std::pair<double, double> cornerCurveDerivative(double t) {
  const double P[4][2] = {{1.0, 0.33}, {0.75, 0.45}, {0.6, 0.85}, {0.31, 1.0}};
  const double b[3] = {(1 - t) * (1 - t), 2 * t * (1 - t), t * t};
  double x = 0, y = 0;
  for (int k = 0; k < 3; ++k) {
    x += 3 * b[k] * (P[k + 1][0] - P[k][0]);
    y += 3 * b[k] * (P[k + 1][1] - P[k][1]);
  }
  return {x, y};
}

// Area of the valid corner region by Green's theorem on the closed loop.
double cornerArea() {
  const double curvePart = oracle::integrate(
      [](double t) {
        const auto [x, y] = cornerCurve(t);
        const auto [dx, dy] = cornerCurveDerivative(t);
        return 0.5 * (x * dy - y * dx);
      },
      0.0, 1.0);
  const std::vector<std::pair<double, double>> poly{{0.31, 1.0}, {0.0, 1.0}, {0.0, 0.0}, {1.0, 0.0}, {1.0, 0.33}};
  double polyPart = 0.0;
  for (std::size_t k = 0; k + 1 < poly.size(); ++k) {
    polyPart += 0.5 * (poly[k].first * poly[k + 1].second - poly[k + 1].first * poly[k].second);
  }
  return curvePart + polyPart;
}

double circleArea(double r) { return std::numbers::pi * r * r / 4.0; }

double totalCutArea(const TrimmedDomain& domain, int n, int q, double* interior = nullptr) {
  const TrimConfiguration cfg = classifyElements(uniformTensor(1, n), domain);
  const CutCellQuadrature cq = cutCellQuadrature(cfg, q);
  double area = 0.0;
  for (const CutElementRule& r : cq.rules) area += r.area();
  double full = 0.0;
  for (int e = 0; e < static_cast<int>(cfg.elements.size()); ++e) {
    if (cfg.elements[e] == Location::Interior) full += cfg.elementRect(e).area();
  }
  if (interior) *interior = full;
  return area + full;
}

}  // namespace

TEST_CASE("classifyPoint examples") {
  CHECK(classifyPoint(lineCase(), {0.5, 0.2}));
  CHECK_FALSE(classifyPoint(lineCase(), {0.5, 0.5}));
  CHECK_FALSE(classifyPoint(circleCase(), {0.9, 0.0}));
  CHECK(classifyPoint(circleCase(), {0.3, 0.3}));
  CHECK(classifyPoint(cornerCase(), {0.1, 0.1}));
  CHECK_FALSE(classifyPoint(cornerCase(), {0.95, 0.95}));
  CHECK(classifyPoint(untrimmedCase(), {0.95, 0.95}));
}

TEST_CASE("ray casting agrees with a dense winding-number oracle") {
  std::vector<std::pair<double, double>> loop;
  constexpr int samples = 20000;
  for (int k = 0; k <= samples; ++k) loop.push_back(cornerCurve(static_cast<double>(k) / samples));
  for (auto v : std::vector<std::pair<double, double>>{{0.0, 1.0}, {0.0, 0.0}, {1.0, 0.0}}) loop.push_back(v);
  loop.push_back(loop.front());

  const TrimmedDomain corner = cornerCase();
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  int agree = 0;
  constexpr int n = 10000;
  for (int k = 0; k < n; ++k) {
    const double x = dist(rng);
    const double y = dist(rng);
    agree += classifyPoint(corner, {x, y}) == (oracle::windingNumber(loop, x, y) != 0);
  }
  CHECK(agree == n);
}

TEST_CASE("points on a curve use the tangent side") {
  const TrimmedDomain corner = cornerCase();
  const auto [x, y] = cornerCurve(0.4);
  CHECK(classifyPoint(corner, {x, y}));
  const auto [dx, dy] = cornerCurveDerivative(0.4);
  const double len = std::hypot(dx, dy);
  CHECK(classifyPoint(corner, {x - 1e-9 * dy / len, y + 1e-9 * dx / len}));
  CHECK_FALSE(classifyPoint(corner, {x + 1e-9 * dy / len, y - 1e-9 * dx / len}));
}

TEST_CASE("intersectEdge") {
  SUBCASE("circle against a horizontal edge") {
    const TrimmingCurve arc = circleCase().curves()[0];
    const auto hits = intersectEdge(arc, {0.5, 0.6}, {0.7, 0.6});
    REQUIRE(hits.size() == 1);
    CHECK(std::abs(hits[0].s - std::sqrt(0.28)) <= 1e-14);
    CHECK_FALSE(hits[0].tangential);
    CHECK(std::abs(distance(arc.eval(hits[0].t), hits[0].point)) <= 1e-12);
  }
  SUBCASE("line closed form") {
    const TrimmingCurve line = lineCase().curves()[0];
    const auto hits = intersectEdge(line, {0.3, 0.3}, {0.3, 0.4});
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].s == doctest::Approx(0.37).epsilon(1e-15));
    CHECK(hits[0].t == doctest::Approx(0.7).epsilon(1e-14));
  }
  SUBCASE("curve entirely on one side") {
    CHECK(intersectEdge(circleCase().curves()[0], {0.0, 0.9}, {0.3, 0.9}).empty());
    CHECK(intersectEdge(lineCase().curves()[0], {0.0, 0.1}, {1.0, 0.1}).empty());
    CHECK(intersectEdge(cornerCase().curves()[0], {0.0, 0.1}, {0.5, 0.1}).empty());
  }
  SUBCASE("polynomial curve hits are refined") {
    const TrimmingCurve c = cornerCase().curves()[0];
    for (int k = 1; k < 40; ++k) {
      const double level = 0.33 + 0.67 * k / 40.0;
      const auto hits = intersectEdge(c, {0.0, level}, {1.0, level});
      REQUIRE(hits.size() == 1);
      CHECK(std::abs(c.eval(hits[0].t).y - level) <= 1e-12);
      CHECK(std::abs(cornerCurve(hits[0].t).first - hits[0].s) <= 1e-12);
    }
  }
  SUBCASE("tangential touch is flagged") {
    const auto hits = intersectEdge(circleCase().curves()[0], {0.8, 0.0}, {0.8, 0.1});
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].tangential);
    const auto bump = intersectEdge(TrimmingCurve::bezier({{0.0, 0.5}, {0.5, 0.0}, {1.0, 0.5}}), {0.0, 0.25}, {1.0, 0.25});
    REQUIRE(bump.size() == 1);
    CHECK(bump[0].tangential);
    CHECK(bump[0].s == doctest::Approx(0.5).epsilon(1e-12));
  }
  CHECK_THROWS_AS(intersectEdge(lineCase().curves()[0], {0, 0}, {1, 1}), std::invalid_argument);
}

TEST_CASE("fixture curves avoid grid vertices in the interior of the domain") {
  for (int n : {5, 10, 20, 40}) {
    for (const TrimmedDomain& d : {lineCase(), circleCase(), cornerCase()}) {
      const TrimmingCurve& c = d.curves()[0];
      for (int i = 1; i < n; ++i) {
        for (int j = 1; j < n; ++j) CHECK(c.distance({double(i) / n, double(j) / n}) > 1e-6);
      }
    }
  }
}

TEST_CASE("element and basis classification") {
  SUBCASE("untrimmed") {
    const TrimConfiguration cfg = classifyElements(uniformTensor(2, 4), untrimmedCase());
    CHECK(cfg.countElements(Location::Interior) == 16);
    CHECK(cfg.countFunctions(Location::Interior) == 36);
    CHECK(cfg.cutFunctions.empty());
    CHECK(cfg.discontinuities[0].empty());
    CHECK(cfg.discontinuities[1].empty());
  }
  SUBCASE("line on a 10x10 mesh") {
    const TensorBasis2D tb = uniformTensor(1, 10);
    const TrimConfiguration cfg = classifyElements(tb, lineCase());
    for (int e = 0; e < tb.numElements(); ++e) {
      const Rect r = cfg.elementRect(e);
      const Location expected = r.y1 < 0.37 ? Location::Interior : (r.y0 > 0.37 ? Location::Exterior : Location::Cut);
      CHECK(cfg.elements[e] == expected);
    }
    CHECK(cfg.countElements(Location::Cut) == 10);
    // Every cut function has a single discontinuity at 0.3 in the second direction.
    for (const CutFunction& cf : cfg.cutFunctions) {
      CHECK(cf.dwqEligible);
      CHECK(cf.discontinuities[0].empty());
      CHECK(cf.discontinuities[1].size() <= 1);
    }
    CHECK(cfg.discontinuities[1] == std::vector<double>{0.3});
  }
  SUBCASE("circle against dense sampling") {
    for (int n : {5, 10, 20}) {
      const TensorBasis2D tb = uniformTensor(2, n);
      const TrimConfiguration cfg = classifyElements(tb, circleCase());
      CHECK(cfg.countElements(Location::Interior) + cfg.countElements(Location::Cut) +
                cfg.countElements(Location::Exterior) ==
            n * n);
      std::set<std::pair<int, int>> cut;
      for (int e = 0; e < tb.numElements(); ++e) {
        const Rect r = cfg.elementRect(e);
        int in = 0, out = 0;
        for (int a = 0; a <= 40; ++a) {
          for (int b = 0; b <= 40; ++b) {
            const double x = r.x0 + r.width() * a / 40.0;
            const double y = r.y0 + r.height() * b / 40.0;
            (x * x + y * y < 0.64 ? in : out)++;
          }
        }
        const Location expected = out == 0 ? Location::Interior : (in == 0 ? Location::Exterior : Location::Cut);
        CHECK(cfg.elements[e] == expected);
        if (cfg.elements[e] == Location::Cut) cut.insert({tb.splitElement(e)[0], tb.splitElement(e)[1]});
      }
      // Cut elements form one connected band (8-neighbourhood).
      std::set<std::pair<int, int>> seen{*cut.begin()};
      std::queue<std::pair<int, int>> todo;
      todo.push(*cut.begin());
      while (!todo.empty()) {
        const auto [a, b] = todo.front();
        todo.pop();
        for (int da = -1; da <= 1; ++da) {
          for (int db = -1; db <= 1; ++db) {
            const std::pair<int, int> nb{a + da, b + db};
            if (cut.count(nb) && !seen.count(nb)) {
              seen.insert(nb);
              todo.push(nb);
            }
          }
        }
      }
      CHECK(seen.size() == cut.size());
    }
  }
  SUBCASE("support split and discontinuities") {
    for (const TrimmedDomain& d : {lineCase(), circleCase(), cornerCase()}) {
      for (int p = 1; p <= 4; ++p) {
        const TensorBasis2D tb = uniformTensor(p, 10);
        const TrimConfiguration cfg = classifyElements(tb, d);
        for (const CutFunction& cf : cfg.cutFunctions) {
          const auto [i1, i2] = tb.split(cf.function);
          const auto r1 = tb.dir(0).supportElements(i1);
          const auto r2 = tb.dir(1).supportElements(i2);
          int valid = 0;
          for (int e1 = r1.first; e1 < r1.second; ++e1) {
            for (int e2 = r2.first; e2 < r2.second; ++e2) valid += cfg.elements[tb.flatElement(e1, e2)] != Location::Exterior;
          }
          CHECK(static_cast<int>(cf.regular.size() + cf.trimmed.size()) == valid);
          CHECK_FALSE(cf.trimmed.empty());
          for (int dir = 0; dir < 2; ++dir) {
            for (double u : cf.discontinuities[dir]) {
              // Knot adjacent to a cut element.
              CHECK(tb.dir(dir).breakpointIndex(u) > 0);
            }
          }
          if (cf.hasBox) {
            for (int e1 = cf.box[0].first; e1 < cf.box[0].second; ++e1) {
              for (int e2 = cf.box[1].first; e2 < cf.box[1].second; ++e2) {
                CHECK(cfg.elements[tb.flatElement(e1, e2)] == Location::Interior);
              }
            }
          }
        }
      }
    }
  }
  SUBCASE("some circle functions are not eligible for one-sided rules") {
    const TrimConfiguration cfg = classifyElements(uniformTensor(3, 10), circleCase());
    int ineligible = 0;
    for (const CutFunction& cf : cfg.cutFunctions) ineligible += !cf.dwqEligible;
    CHECK(ineligible > 0);
    CHECK(ineligible < static_cast<int>(cfg.cutFunctions.size()));
  }
  SUBCASE("curve inside one element without crossing is rejected") {
    const TrimmedDomain island(Rect{}, {TrimmingCurve::arc({0.55, 0.55}, 0.02, 0.0, 2 * std::numbers::pi)});
    CHECK_THROWS_AS(classifyElements(uniformTensor(1, 10), island), ConfigurationError);
  }
}

TEST_CASE("valid support measure of cut functions") {
  const TensorBasis2D tb = uniformTensor(2, 10);
  const TrimConfiguration cfg = classifyElements(tb, circleCase());
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  const int count = std::min<int>(50, static_cast<int>(cfg.cutFunctions.size()));
  for (int k = 0; k < count; ++k) {
    const CutFunction& cf = cfg.cutFunctions[static_cast<std::size_t>(k) * cfg.cutFunctions.size() / count];
    const auto [i1, i2] = tb.split(cf.function);
    const Rect supp{tb.dir(0).supportBegin(i1), tb.dir(0).supportEnd(i1), tb.dir(1).supportBegin(i2),
                    tb.dir(1).supportEnd(i2)};
    int in = 0;
    constexpr int samples = 100000;
    for (int s = 0; s < samples; ++s) {
      const double x = supp.x0 + supp.width() * dist(rng);
      const double y = supp.y0 + supp.height() * dist(rng);
      in += x * x + y * y < 0.64;
    }
    CHECK(in > 0);
    CHECK(in < samples);
  }
}

TEST_CASE("cut-cell decomposition") {
  SUBCASE("straight line gives straight cells and exact areas") {
    const TrimmedDomain line = lineCase();
    const auto cells = decomposeCutElement(line, Rect{0.3, 0.4, 0.3, 0.4}, 3);
    REQUIRE(cells.size() == 1);
    CHECK(integrateSubCells(cells, 3, 0).area() == doctest::Approx(0.1 * 0.07).epsilon(1e-14));
    CHECK(std::abs(totalCutArea(line, 10, 2) - 0.37) <= 1e-14);
    CHECK(std::abs(totalCutArea(line, 7, 1) - 0.37) <= 1e-14);
  }
  SUBCASE("circle area at h = 1/10, q = 4") {
    CHECK(std::abs(totalCutArea(circleCase(), 10, 4) - circleArea(0.8)) <= 1e-8);
  }
  SUBCASE("circle area converges at order q+1") {
    for (int q = 1; q <= 3; ++q) {
      std::vector<double> logH, logE;
      for (int n : {5, 10, 20, 40}) {
        const double err = std::abs(totalCutArea(circleCase(), n, q) - circleArea(0.8));
        if (err < 1e-13) continue;
        logH.push_back(std::log(1.0 / n));
        logE.push_back(std::log(err));
      }
      REQUIRE(logH.size() >= 2);
      INFO("q=", q);
      CHECK(oracle::slope(logH, logE) >= q + 1 - 0.2);
    }
  }
  SUBCASE("per-element area error against a fine reference, corner curve") {
    // Sum over cut elements of |A_q - A_6|; a cubic edge is reproduced exactly for q >= 3.
    auto elementError = [](int n, int q) {
      const TrimConfiguration cfg = classifyElements(uniformTensor(1, n), cornerCase());
      const CutCellQuadrature a = cutCellQuadrature(cfg, q);
      const CutCellQuadrature ref = cutCellQuadrature(cfg, 6);
      double e = 0.0;
      for (std::size_t k = 0; k < a.rules.size(); ++k) e += std::abs(a.rules[k].area() - ref.rules[k].area());
      return e;
    };
    for (int q = 1; q <= 2; ++q) {
      std::vector<double> logH, logE;
      for (int n : {10, 20, 40, 80}) {
        logH.push_back(std::log(1.0 / n));
        logE.push_back(std::log(elementError(n, q)));
      }
      INFO("q=", q);
      CHECK(oracle::slope(logH, logE) >= q + 1 - 0.2);
    }
    for (int q = 3; q <= 5; ++q) CHECK(elementError(10, q) <= 1e-14);
    CHECK(std::abs(totalCutArea(cornerCase(), 10, 3) - cornerArea()) <= 1e-13);
  }
  SUBCASE("per-element area identity, circle") {
    for (int q = 2; q <= 4; ++q) {
      const TrimConfiguration cfg = classifyElements(uniformTensor(1, 10), circleCase());
      const CutCellQuadrature cq = cutCellQuadrature(cfg, q);
      double worst = 0.0;
      for (const CutElementRule& r : cq.rules) {
        const Rect box = cfg.elementRect(r.element);
        // Valid area of the element: integral of the clipped circle height over x.
        const double exact = oracle::integratePiecewise(
            [&](double x) {
              const double h = x < 0.8 ? std::sqrt(0.64 - x * x) : 0.0;
              return std::clamp(h, box.y0, box.y1) - box.y0;
            },
            box.x0, box.x1, {std::sqrt(std::max(0.0, 0.64 - box.y1 * box.y1)), std::sqrt(std::max(0.0, 0.64 - box.y0 * box.y0))},
            1e-16);
        worst = std::max(worst, std::abs(r.area() - exact));
      }
      INFO("q=", q);
      CHECK(worst <= std::pow(0.1, q + 2));
    }
  }
  SUBCASE("all points lie in the valid region") {
    for (const TrimmedDomain& d : {lineCase(), circleCase(), cornerCase()}) {
      for (int q = 1; q <= 6; ++q) {
        for (int n : {5, 10, 20}) {
          const TrimConfiguration cfg = classifyElements(uniformTensor(q, n), d);
          const CutCellQuadrature cq = cutCellQuadrature(cfg, q);
          CHECK(cq.rules.size() == static_cast<std::size_t>(cfg.countElements(Location::Cut)));
          int bad = 0;
          for (const CutElementRule& r : cq.rules) {
            CHECK(r.subCells >= 1);
            CHECK(r.subCells <= 4);
            for (const Point2& p : r.points) {
              bad += !d.insideWithin(p, 1e-10);
              bad += !cfg.elementRect(r.element).contains(p, 1e-14);
            }
          }
          INFO(d.name(), " q=", q, " n=", n);
          CHECK(bad == 0);
        }
      }
    }
  }
  SUBCASE("corner snapping emits a triangle") {
    // Passes within 1e-12 of the corner (0, 0.2); the valid part of the cell is a triangle below.
    const TrimmedDomain d(Rect{}, {TrimmingCurve::line({1.0, 0.4 + 1e-12}, {0.0, 0.2 + 1e-12})});
    const auto cells = decomposeCutElement(d, Rect{0.0, 0.2, 0.2, 0.4}, 2);
    REQUIRE(cells.size() == 1);
    CHECK(cells[0].vertices[0] == cells[0].vertices[1]);
    CHECK(((cells[0].top.front() == Point2{0.0, 0.2}) || (cells[0].top.back() == Point2{0.0, 0.2})));
    CHECK(integrateSubCells(cells, 2, 0).area() == doctest::Approx(0.5 * 0.2 * 0.04).epsilon(1e-9));
  }
  SUBCASE("two crossings on one edge are resolved by splitting") {
    const TrimmedDomain bump(Rect{}, {TrimmingCurve::arc({0.5, 0.0}, 0.08, 0.0, std::numbers::pi)});
    const auto cells = decomposeCutElement(bump, Rect{0.4, 0.6, 0.0, 0.2}, 4);
    CHECK(cells.size() >= 2);
    CHECK(std::abs(integrateSubCells(cells, 5, 0).area() - std::numbers::pi * 0.0064 / 2) <= 1e-7);
  }
  CHECK_THROWS_AS(decomposeCutElement(lineCase(), Rect{0.3, 0.4, 0.3, 0.4}, 7), std::invalid_argument);
}
