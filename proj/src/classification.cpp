#include "trimquad/classification.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "trimquad/errors.hpp"

namespace trimquad {

const char* locationName(Location l) {
  switch (l) {
    case Location::Interior: return "interior";
    case Location::Exterior: return "exterior";
    case Location::Cut: return "cut";
  }
  return "?";
}

Rect TrimConfiguration::elementRect(int e) const {
  const auto [e1, e2] = basis.splitElement(e);
  const Element& a = basis.dir(0).elements()[e1];
  const Element& b = basis.dir(1).elements()[e2];
  return Rect{a.a, a.b, b.a, b.b};
}

int TrimConfiguration::countElements(Location l) const {
  return static_cast<int>(std::count(elements.begin(), elements.end(), l));
}

int TrimConfiguration::countFunctions(Location l) const {
  return static_cast<int>(std::count(functions.begin(), functions.end(), l));
}

namespace {

void splitSupport(const TrimConfiguration& cfg, CutFunction& cf) {
  const TensorBasis2D& tb = cfg.basis;
  const auto [i1, i2] = tb.split(cf.function);
  const std::array<std::pair<int, int>, 2> range{tb.dir(0).supportElements(i1), tb.dir(1).supportElements(i2)};
  auto at = [&](int e1, int e2) { return cfg.elements[tb.flatElement(e1, e2)]; };

  for (int e1 = range[0].first; e1 < range[0].second; ++e1) {
    for (int e2 = range[1].first; e2 < range[1].second; ++e2) {
      const Location l = at(e1, e2);
      if (l == Location::Interior) cf.regular.push_back(tb.flatElement(e1, e2));
      if (l == Location::Cut) cf.trimmed.push_back(tb.flatElement(e1, e2));
    }
  }

  // Boundary index m of a knot between elements m-1 and m, with the side of the interior one.
  bool consistent = true;
  std::array<std::set<int>, 2> discIndex;
  std::array<std::set<Side>, 2> sides;
  for (int d = 0; d < 2; ++d) {
    const int o = 1 - d;
    for (int eo = range[o].first; eo < range[o].second; ++eo) {
      for (int e = range[d].first; e + 1 < range[d].second; ++e) {
        const Location lo = d == 0 ? at(e, eo) : at(eo, e);
        const Location hi = d == 0 ? at(e + 1, eo) : at(eo, e + 1);
        if (lo == Location::Interior && hi == Location::Cut) {
          discIndex[d].insert(e + 1);
          sides[d].insert(Side::Below);
        } else if (lo == Location::Cut && hi == Location::Interior) {
          discIndex[d].insert(e + 1);
          sides[d].insert(Side::Above);
        }
      }
    }
    for (int m : discIndex[d]) {
      cf.discontinuities[d].push_back(tb.dir(d).elements()[m].a);
    }
    if (discIndex[d].size() > 1 || sides[d].size() > 1) consistent = false;
    if (!sides[d].empty()) cf.regularSide[d] = *sides[d].begin();
  }

  cf.gaussElements = cf.regular;
  if (!consistent) return;
  if (discIndex[0].empty() && discIndex[1].empty()) {
    cf.dwqEligible = true;
    return;
  }
  for (int d = 0; d < 2; ++d) {
    auto& box = cf.box[d];
    box = range[d];
    if (!discIndex[d].empty()) {
      const int m = *discIndex[d].begin();
      if (cf.regularSide[d] == Side::Below) {
        box.second = m;
      } else {
        box.first = m;
      }
    }
  }
  for (int e1 = cf.box[0].first; e1 < cf.box[0].second; ++e1) {
    for (int e2 = cf.box[1].first; e2 < cf.box[1].second; ++e2) {
      if (at(e1, e2) != Location::Interior) return;
    }
  }
  cf.dwqEligible = true;
  cf.hasBox = true;
  std::erase_if(cf.gaussElements, [&](int e) {
    const auto [e1, e2] = tb.splitElement(e);
    return e1 >= cf.box[0].first && e1 < cf.box[0].second && e2 >= cf.box[1].first && e2 < cf.box[1].second;
  });
}

}  // namespace

TrimConfiguration classifyElements(const TensorBasis2D& basis, const TrimmedDomain& domain) {
  TrimConfiguration cfg{basis, domain, {}, {}, {}, {}, {}};
  cfg.elements.resize(basis.numElements());
  std::vector<int> crossings(cfg.elements.size(), 0);
  for (int e = 0; e < basis.numElements(); ++e) {
    const Rect r = cfg.elementRect(e);
    const auto xs = domain.curves().empty() ? std::vector<CellCrossing>{} : cellCrossings(domain, r);
    crossings[e] = static_cast<int>(xs.size());
    if (xs.size() >= 2) {
      cfg.elements[e] = Location::Cut;
    } else {
      cfg.elements[e] = domain.inside(r.center()) ? Location::Interior : Location::Exterior;
    }
  }

  // A curve running through an element must cross that element's edges.
  for (const TrimmingCurve& c : domain.curves()) {
    constexpr int samples = 1024;
    for (int k = 0; k < samples; ++k) {
      const Point2 p = c.eval((k + 0.5) / samples);
      if (!domain.bounds().contains(p)) continue;
      const int e = basis.flatElement(basis.dir(0).elementOf(p.x), basis.dir(1).elementOf(p.y));
      if (crossings[e] < 2) {
        const auto [e1, e2] = basis.splitElement(e);
        throw ConfigurationError("trimming curve passes through element (" + std::to_string(e1) + "," +
                                 std::to_string(e2) + ") without crossing its edges");
      }
    }
  }

  const int n = basis.size();
  cfg.functions.resize(n);
  cfg.cutIndex.assign(n, -1);
  std::array<std::set<double>, 2> used;
  for (int i = 0; i < n; ++i) {
    const auto [i1, i2] = basis.split(i);
    const auto r1 = basis.dir(0).supportElements(i1);
    const auto r2 = basis.dir(1).supportElements(i2);
    int interior = 0, exterior = 0, total = 0;
    for (int e1 = r1.first; e1 < r1.second; ++e1) {
      for (int e2 = r2.first; e2 < r2.second; ++e2) {
        const Location l = cfg.elements[basis.flatElement(e1, e2)];
        interior += l == Location::Interior;
        exterior += l == Location::Exterior;
        ++total;
      }
    }
    Location l = Location::Cut;
    if (interior == total) l = Location::Interior;
    if (exterior == total) l = Location::Exterior;
    cfg.functions[i] = l;
    if (l != Location::Cut) continue;
    CutFunction cf;
    cf.function = i;
    splitSupport(cfg, cf);
    if (cf.hasBox) {
      for (int d = 0; d < 2; ++d) {
        for (double u : cf.discontinuities[d]) used[d].insert(u);
      }
    }
    cfg.cutIndex[i] = static_cast<int>(cfg.cutFunctions.size());
    cfg.cutFunctions.push_back(std::move(cf));
  }
  for (int d = 0; d < 2; ++d) {
    cfg.discontinuities[d].assign(used[d].begin(), used[d].end());
  }
  return cfg;
}

}  // namespace trimquad
