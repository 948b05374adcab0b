#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "trimquad/assembly.hpp"
#include "trimquad/curves.hpp"

namespace trimquad::cli {

enum class Command { Mass, Converge, Time };

struct RunConfig {
  Command command = Command::Mass;
  std::vector<std::string> cases{"line"};
  std::vector<Strategy> strategies{std::begin(kAllStrategies), std::end(kAllStrategies)};
  std::optional<std::vector<int>> degrees;  // defaults depend on the command
  std::optional<std::vector<int>> meshes;
  std::filesystem::path out = "results";
  bool parallel = false;
  unsigned seed = 1;  // recorded in run.json; no current output is randomized
  int repetitions = 5;
  double lineLevel = 0.37;     // line case: u2 = level, valid below
  double circleRadius = 0.8;   // circle case: quarter disc at the origin
  bool dump = false;           // also write rule JSON and cut-quadrature CSV

  /// The named case with this config's geometry parameters.
  TrimmedDomain domain(const std::string& name) const;

  std::vector<int> degreeList() const;
  std::vector<int> meshList() const;
  /// Throws std::invalid_argument on values outside the catalog.
  void validate() const;
};

/// "1..6", "2", "1,3,5" (ranges and lists may be mixed).
std::vector<int> parseIntList(const std::string& text);
/// Comma list of case names; "all" expands to line,circle,corner.
std::vector<std::string> parseCases(const std::string& text);
/// Comma list of strategy names; "all" expands to every strategy.
std::vector<Strategy> parseStrategies(const std::string& text);

/// Overwrite the fields present in a JSON object (keys: case, strategy, degrees,
/// meshes, out, parallel, seed, repetitions, dump, geometry). Lists may be arrays or
/// strings; geometry is {"line_level": .., "circle_radius": ..}.
void applyJson(RunConfig& config, const std::string& jsonText);
std::string toJson(const RunConfig& config);

const char* commandName(Command c);

}  // namespace trimquad::cli
