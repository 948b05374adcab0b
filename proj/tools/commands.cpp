#include "commands.hpp"

#include <fstream>
#include <ostream>
#include <stdexcept>

#include "serialize.hpp"
#include "trimquad/experiments.hpp"

namespace trimquad::cli {

namespace {

std::filesystem::path writeFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  return path;
}

void runMass(const RunConfig& cfg, std::ostream& log, std::vector<std::filesystem::path>& files) {
  const std::vector<int> degrees = cfg.degreeList();
  for (const std::string& name : cfg.cases) {
    for (int n : cfg.meshList()) {
      const auto rows = massMatrixTable(cfg.domain(name), degrees, n, cfg.parallel);
      const std::string csv = massTableCsv(rows);
      files.push_back(writeFile(cfg.out / ("mass_" + name + "_" + std::to_string(n) + ".csv"), csv));
      log << "# " << name << ", " << n << "x" << n << " elements\n" << csv;
    }
  }
}

void runConverge(const RunConfig& cfg, std::ostream& log, std::vector<std::filesystem::path>& files) {
  std::vector<Strategy> strategies;
  for (Strategy s : cfg.strategies) {
    if (s == Strategy::WQ) {
      log << "skipping wq: its mass matrix is indefinite on trimmed domains\n";
    } else {
      strategies.push_back(s);
    }
  }
  if (strategies.empty()) throw std::invalid_argument("no strategy left to project with");
  const std::vector<int> degrees = cfg.degreeList(), meshes = cfg.meshList();
  StudyOptions options;
  options.parallel = cfg.parallel;
  std::vector<RateSummary> summary;
  for (const std::string& name : cfg.cases) {
    const ConvergenceRun r = runConvergence(cfg.domain(name), strategies, degrees, meshes, options);
    files.push_back(writeFile(cfg.out / ("convergence_" + name + ".csv"), convergenceCsv(r.records)));
    summary.insert(summary.end(), r.summary.begin(), r.summary.end());
  }
  const std::string csv = rateSummaryCsv(summary);
  files.push_back(writeFile(cfg.out / "convergence_summary.csv", csv));
  log << csv;
}

void runTime(const RunConfig& cfg, std::ostream& log, std::vector<std::filesystem::path>& files) {
  std::vector<TimingRecord> rows;
  const int n = cfg.meshList().back();
  for (const std::string& name : cfg.cases) {
    const TrimmedDomain domain = cfg.domain(name);
    for (int p : cfg.degreeList()) {
      for (const TimingRecord& r : timeFormations(domain, cfg.strategies, p, n, cfg.repetitions, cfg.parallel)) {
        rows.push_back(r);
        log << name << ' ' << strategyName(r.report.strategy) << " p=" << p << " total " << r.report.tTotal
            << " s\n";
      }
    }
  }
  files.push_back(writeFile(cfg.out / "timings.csv", timingCsv(rows)));
}

void runDump(const RunConfig& cfg, std::vector<std::filesystem::path>& files) {
  for (const std::string& name : cfg.cases) {
    const TrimmedDomain domain = cfg.domain(name);
    for (int p : cfg.degreeList()) {
      for (int n : cfg.meshList()) {
        const Basis1D b(KnotVector::uniform(p, n));
        const TrimConfiguration tc = classifyElements(TensorBasis2D(b, b), domain);
        const std::string stem = name + "_p" + std::to_string(p) + "_n" + std::to_string(n);
        files.push_back(writeFile(cfg.out / ("rules_" + stem + ".json"), ruleDumpJson(tc)));
        files.push_back(writeFile(cfg.out / ("quad_" + stem + ".csv"),
                                  cutQuadratureCsv(massCutQuadrature(tc, cfg.parallel))));
      }
    }
  }
}

}  // namespace

std::vector<std::filesystem::path> run(const RunConfig& config, std::ostream& log) {
  config.validate();
  std::filesystem::create_directories(config.out);
  std::vector<std::filesystem::path> files{writeFile(config.out / "run.json", toJson(config))};
  switch (config.command) {
    case Command::Mass: runMass(config, log, files); break;
    case Command::Converge: runConverge(config, log, files); break;
    case Command::Time: runTime(config, log, files); break;
  }
  if (config.dump) runDump(config, files);
  return files;
}

}  // namespace trimquad::cli
