#pragma once

#include <array>
#include <utility>
#include <vector>

#include "trimquad/basis.hpp"
#include "trimquad/curves.hpp"
#include "trimquad/weighted_quadrature.hpp"

namespace trimquad {

enum class Location { Interior, Exterior, Cut };

const char* locationName(Location l);

/// Support split of a cut basis function.
struct CutFunction {
  int function = 0;            ///< flat tensor index
  std::vector<int> regular;    ///< interior elements of the support (flat element indices)
  std::vector<int> trimmed;    ///< cut elements of the support
  /// Knots across which a cut and an interior element of the support meet, per direction.
  std::array<std::vector<double>, 2> discontinuities;
  std::array<Side, 2> regularSide{Side::Below, Side::Below};

  /// At most one discontinuity per direction with a consistent regular side, and the
  /// box it bounds holds interior elements only.
  bool dwqEligible = false;
  bool hasBox = false;
  std::array<std::pair<int, int>, 2> box{};  ///< half-open element ranges per direction
  std::vector<int> gaussElements;            ///< regular elements not covered by the box
};

/// Element and basis classification of a trimmed tensor-product space.
struct TrimConfiguration {
  TensorBasis2D basis;
  TrimmedDomain domain;
  std::vector<Location> elements;   ///< per flat element index
  std::vector<Location> functions;  ///< per flat function index
  std::vector<CutFunction> cutFunctions;
  std::vector<int> cutIndex;        ///< per function: index into cutFunctions or -1
  /// Sorted discontinuity locations used by box-carrying cut functions, per direction.
  std::array<std::vector<double>, 2> discontinuities;

  Rect elementRect(int e) const;
  int countElements(Location l) const;
  int countFunctions(Location l) const;
  const CutFunction* cutFunction(int i) const {
    const int k = cutIndex[static_cast<std::size_t>(i)];
    return k < 0 ? nullptr : &cutFunctions[static_cast<std::size_t>(k)];
  }
};

/// Classify elements (corner/edge crossings), then basis functions from their supports.
/// Throws ConfigurationError if a curve passes through an element without crossing its edges.
TrimConfiguration classifyElements(const TensorBasis2D& basis, const TrimmedDomain& domain);

}  // namespace trimquad
