#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace trimquad::cli;

int main(int argc, char** argv) {
  CLI::App app{"Mass matrices and L2 projection on trimmed B-spline spaces"};
  app.require_subcommand(1);

  std::string config, cases, strategies, degrees, meshes, out;
  bool parallel = false, dump = false;
  unsigned seed = 0;
  int repetitions = 0;
  for (auto [name, help] : {std::pair{"mass", "mass-matrix deviation of each strategy from the Gauss reference"},
                            std::pair{"converge", "L2-projection convergence study"},
                            std::pair{"time", "formation timings (medians)"}}) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "JSON run configuration; command-line flags override it");
    sub->add_option("--case", cases, "line|circle|corner, comma list or all");
    sub->add_option("--strategy", strategies, "reference|wq|hybrid|dwq, comma list or all");
    sub->add_option("--degrees", degrees, "e.g. 1..6 or 2,4");
    sub->add_option("--meshes", meshes, "elements per side, e.g. 5,10,20,40");
    sub->add_option("--out", out, "output directory");
    sub->add_flag("--parallel", parallel, "parallel row formation and rule construction");
    sub->add_option("--seed", seed, "seed for randomized checks");
    sub->add_flag("--dump", dump, "also write rules_*.json and quad_*.csv (u1,u2,weight) per case, p, mesh");
    sub->add_option("--repetitions", repetitions, "timing repetitions (time only)");
  }
  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg;
    const std::string cmd = app.get_subcommands().front()->get_name();
    cfg.command = cmd == "mass" ? Command::Mass : cmd == "converge" ? Command::Converge : Command::Time;
    if (!config.empty()) {
      std::ifstream f(config);
      if (!f) throw std::runtime_error("cannot read " + config);
      std::stringstream text;
      text << f.rdbuf();
      applyJson(cfg, text.str());
    }
    if (!cases.empty()) cfg.cases = parseCases(cases);
    if (!strategies.empty()) cfg.strategies = parseStrategies(strategies);
    if (!degrees.empty()) cfg.degrees = parseIntList(degrees);
    if (!meshes.empty()) cfg.meshes = parseIntList(meshes);
    if (!out.empty()) cfg.out = out;
    if (parallel) cfg.parallel = true;
    if (dump) cfg.dump = true;
    if (seed) cfg.seed = seed;
    if (repetitions) cfg.repetitions = repetitions;
    for (const auto& path : run(cfg, std::cout)) std::cerr << "wrote " << path.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "trimquad: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
