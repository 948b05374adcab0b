#pragma once

#include <string>

#include <json.hpp>

#include "trimquad/assembly.hpp"

namespace trimquad::cli {

/// {"degree": p, "knots": [...]}
nlohmann::json toJson(const KnotVector& kv);
/// Throws std::invalid_argument on missing fields or an invalid knot vector.
KnotVector knotVectorFromJson(const nlohmann::json& j);

/// WQ rules of both directions plus the DWQ rules at every discontinuity of the
/// configuration: points and per-row sparse weights (first point + run of weights).
std::string ruleDumpJson(const TrimConfiguration& config);

/// u1,u2,weight for every cut-element point.
std::string cutQuadratureCsv(const CutCellQuadrature& cut);

}  // namespace trimquad::cli
