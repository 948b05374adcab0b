#include "run_config.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "trimquad/curves.hpp"

namespace trimquad::cli {

namespace {

std::vector<std::string> splitComma(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int toInt(const std::string& s) {
  std::size_t used = 0;
  const int v = std::stoi(s, &used);
  if (used != s.size()) throw std::invalid_argument("not an integer: " + s);
  return v;
}

template <class T>
std::string listOrString(const nlohmann::json& j, T joinItem) {
  if (j.is_string()) return j.get<std::string>();
  std::string s;
  for (const auto& item : j) s += (s.empty() ? "" : ",") + joinItem(item);
  return s;
}

}  // namespace

std::vector<int> parseIntList(const std::string& text) {
  std::vector<int> out;
  for (const std::string& item : splitComma(text)) {
    if (const auto dots = item.find(".."); dots != std::string::npos) {
      const int a = toInt(item.substr(0, dots)), b = toInt(item.substr(dots + 2));
      if (b < a) throw std::invalid_argument("empty range " + item);
      for (int k = a; k <= b; ++k) out.push_back(k);
    } else {
      out.push_back(toInt(item));
    }
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

std::vector<std::string> parseCases(const std::string& text) {
  std::vector<std::string> out;
  for (const std::string& c : splitComma(text)) {
    if (c == "all") {
      out.insert(out.end(), {"line", "circle", "corner"});
    } else {
      caseByName(c);  // throws for unknown names
      out.push_back(c);
    }
  }
  if (out.empty()) throw std::invalid_argument("no case given");
  return out;
}

std::vector<Strategy> parseStrategies(const std::string& text) {
  std::vector<Strategy> out;
  for (const std::string& s : splitComma(text)) {
    if (s == "all") {
      out.assign(std::begin(kAllStrategies), std::end(kAllStrategies));
    } else if (std::find(out.begin(), out.end(), strategyFromName(s)) == out.end()) {
      out.push_back(strategyFromName(s));
    }
  }
  if (out.empty()) throw std::invalid_argument("no strategy given");
  return out;
}

std::vector<int> RunConfig::degreeList() const {
  if (degrees) return *degrees;
  return command == Command::Converge ? std::vector<int>{1, 2, 3, 4} : std::vector<int>{1, 2, 3, 4, 5, 6};
}

std::vector<int> RunConfig::meshList() const {
  if (meshes) return *meshes;
  switch (command) {
    case Command::Mass: return {10};
    case Command::Converge: return {5, 10, 20, 40};
    case Command::Time: return {80};
  }
  return {};
}

void RunConfig::validate() const {
  for (int p : degreeList()) {
    if (p < 1 || p > 6) throw std::invalid_argument("degrees must lie in 1..6");
  }
  for (int n : meshList()) {
    if (n < 1) throw std::invalid_argument("meshes must be positive");
  }
  for (const std::string& c : cases) {
    if (c != "line" && c != "circle" && c != "corner") throw std::invalid_argument("unknown case " + c);
  }
  if (repetitions < 1) throw std::invalid_argument("repetitions must be positive");
  // Both curves must cross the open square without touching its corners.
  if (!(lineLevel > 0.0 && lineLevel < 1.0)) throw std::invalid_argument("line_level must lie in (0, 1)");
  if (!(circleRadius > 0.0 && circleRadius < 1.0)) throw std::invalid_argument("circle_radius must lie in (0, 1)");
}

TrimmedDomain RunConfig::domain(const std::string& name) const {
  if (name == "line") return lineCase(lineLevel);
  if (name == "circle") return circleCase(circleRadius);
  return caseByName(name);
}

void applyJson(RunConfig& config, const std::string& jsonText) {
  const nlohmann::json j = nlohmann::json::parse(jsonText);
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  const auto asString = [](const nlohmann::json& v) { return v.get<std::string>(); };
  const auto asNumber = [](const nlohmann::json& v) { return std::to_string(v.get<int>()); };
  for (const auto& [key, v] : j.items()) {
    if (key == "case") {
      config.cases = parseCases(listOrString(v, asString));
    } else if (key == "strategy") {
      config.strategies = parseStrategies(listOrString(v, asString));
    } else if (key == "degrees") {
      config.degrees = parseIntList(listOrString(v, asNumber));
    } else if (key == "meshes") {
      config.meshes = parseIntList(listOrString(v, asNumber));
    } else if (key == "out") {
      config.out = v.get<std::string>();
    } else if (key == "parallel") {
      config.parallel = v.get<bool>();
    } else if (key == "seed") {
      config.seed = v.get<unsigned>();
    } else if (key == "repetitions") {
      config.repetitions = v.get<int>();
    } else if (key == "dump") {
      config.dump = v.get<bool>();
    } else if (key == "geometry") {
      for (const auto& [g, x] : v.items()) {
        if (g == "line_level") {
          config.lineLevel = x.get<double>();
        } else if (g == "circle_radius") {
          config.circleRadius = x.get<double>();
        } else {
          throw std::invalid_argument("unknown geometry key " + g);
        }
      }
    } else {
      throw std::invalid_argument("unknown config key " + key);
    }
  }
}

const char* commandName(Command c) {
  switch (c) {
    case Command::Mass: return "mass";
    case Command::Converge: return "converge";
    case Command::Time: return "time";
  }
  return "?";
}

std::string toJson(const RunConfig& config) {
  nlohmann::json j;
  j["command"] = commandName(config.command);
  j["case"] = config.cases;
  std::vector<std::string> s;
  for (Strategy st : config.strategies) s.emplace_back(strategyName(st));
  j["strategy"] = s;
  j["degrees"] = config.degreeList();
  j["meshes"] = config.meshList();
  j["out"] = config.out.string();
  j["parallel"] = config.parallel;
  j["seed"] = config.seed;
  j["repetitions"] = config.repetitions;
  j["dump"] = config.dump;
  j["geometry"] = {{"line_level", config.lineLevel}, {"circle_radius", config.circleRadius}};
  return j.dump(2) + "\n";
}

}  // namespace trimquad::cli
