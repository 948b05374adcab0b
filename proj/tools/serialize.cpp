#include "serialize.hpp"

#include <sstream>
#include <stdexcept>

namespace trimquad::cli {

namespace {

nlohmann::json rowsJson(std::span<const WeightRow> rows) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].empty()) continue;
    out.push_back({{"function", i}, {"first", rows[i].firstPoint}, {"weights", rows[i].weights}});
  }
  return out;
}

}  // namespace

nlohmann::json toJson(const KnotVector& kv) {
  return {{"degree", kv.degree()}, {"knots", std::vector<double>(kv.knots().begin(), kv.knots().end())}};
}

KnotVector knotVectorFromJson(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("degree") || !j.contains("knots")) {
    throw std::invalid_argument("knot vector needs \"degree\" and \"knots\"");
  }
  try {
    return KnotVector(j.at("degree").get<int>(), j.at("knots").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad knot vector: ") + e.what());
  }
}

std::string ruleDumpJson(const TrimConfiguration& config) {
  nlohmann::json j;
  j["case"] = config.domain.name();
  j["directions"] = nlohmann::json::array();
  for (int d = 0; d < 2; ++d) {
    const Basis1D& b = config.basis.dir(d);
    const WeightedRuleSet wq = buildWQRules(b, d);
    nlohmann::json dir{{"direction", d}, {"basis", toJson(b.knotVector())}};
    dir["wq"] = {{"points", wq.layout.points}, {"max_residual", wq.maxRelativeResidual}, {"rows", rowsJson(wq.rows)}};
    dir["dwq"] = nlohmann::json::array();
    for (double u : config.discontinuities[static_cast<std::size_t>(d)]) {
      const DiscontinuousRuleSet r = buildDWQ(b, wq.layout, u, d);
      dir["dwq"].push_back({{"disc", u},
                            {"split", r.splitPoint},
                            {"points", r.layout.points},
                            {"max_residual", r.maxRelativeResidual},
                            {"rows", rowsJson(r.rows)}});
    }
    j["directions"].push_back(std::move(dir));
  }
  return j.dump(1) + "\n";
}

std::string cutQuadratureCsv(const CutCellQuadrature& cut) {
  std::ostringstream out;
  out << "u1,u2,weight\n";
  out.precision(17);
  for (const CutElementRule& r : cut.rules) {
    for (std::size_t k = 0; k < r.points.size(); ++k) {
      out << r.points[k].x << ',' << r.points[k].y << ',' << r.weights[k] << '\n';
    }
  }
  return out.str();
}

}  // namespace trimquad::cli
