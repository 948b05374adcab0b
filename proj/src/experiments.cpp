#include "trimquad/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace trimquad {

namespace {

TensorBasis2D uniformSquare(int p, int n) {
  return TensorBasis2D(Basis1D(KnotVector::uniform(p, n)), Basis1D(KnotVector::uniform(p, n)));
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

std::vector<MassTableRow> massMatrixTable(const TrimmedDomain& domain, std::span<const int> degrees, int elements,
                                          bool parallel) {
  std::vector<MassTableRow> out;
  for (int p : degrees) {
    const TrimConfiguration cfg = classifyElements(uniformSquare(p, elements), domain);
    const CutCellQuadrature cut = massCutQuadrature(cfg, parallel);
    const SparseMatrix ref = assembleGaussReference(cfg, {}, cut);
    MassTableRow row;
    row.degree = p;
    row.referenceNorm = ref.frobenius();
    for (int k = 0; k < 3; ++k) {
      const SparseMatrix m = assemble(kFastStrategies[k], cfg, {}, cut, {parallel, true});
      row.absolute[k] = frobeniusDistance(m, ref);
      row.relative[k] = row.absolute[k] / row.referenceNorm;
    }
    out.push_back(row);
  }
  return out;
}

std::string massTableCsv(std::span<const MassTableRow> rows) {
  std::ostringstream out;
  out << "p,ref_norm,wq_abs,wq_rel,hybrid_abs,hybrid_rel,dwq_abs,dwq_rel\n";
  out.precision(6);
  out << std::scientific;
  for (const MassTableRow& r : rows) {
    out << r.degree << ',' << r.referenceNorm;
    for (int k = 0; k < 3; ++k) out << ',' << r.absolute[k] << ',' << r.relative[k];
    out << '\n';
  }
  return out.str();
}

ConvergenceRun runConvergence(const TrimmedDomain& domain, std::span<const Strategy> strategies,
                              std::span<const int> degrees, std::span<const int> meshes,
                              const StudyOptions& options) {
  if (meshes.size() < 2) throw std::invalid_argument("convergence needs at least two meshes");
  ConvergenceRun run;
  for (Strategy s : strategies) {
    if (s == Strategy::WQ) {
      throw std::invalid_argument("naive weighted quadrature gives an indefinite mass matrix; no projection");
    }
    const std::vector<ConvergenceRecord> r = runConvergenceStudy(domain, s, degrees, meshes, options);
    run.records.insert(run.records.end(), r.begin(), r.end());
  }

  std::map<std::pair<int, int>, double> reference;  // (p, n) -> error
  for (const ConvergenceRecord& r : run.records) {
    if (r.strategy == Strategy::Reference) reference[{r.degree, r.elements}] = r.l2;
  }
  for (Strategy s : strategies) {
    for (int p : degrees) {
      RateSummary sum;
      sum.caseName = domain.name();
      sum.strategy = s;
      sum.degree = p;
      sum.minRate = std::numeric_limits<double>::infinity();
      sum.agreement = reference.empty() ? std::numeric_limits<double>::quiet_NaN() : 0.0;
      for (const ConvergenceRecord& r : run.records) {
        if (r.strategy != s || r.degree != p) continue;
        if (std::isfinite(r.rate)) {
          sum.rate = r.rate;  // records are ordered coarse to fine
          sum.minRate = std::min(sum.minRate, r.rate);
        }
        if (const auto it = reference.find({p, r.elements}); it != reference.end()) {
          sum.agreement = std::max(sum.agreement, std::abs(r.l2 - it->second) / it->second);
        }
      }
      sum.pass = sum.rate >= p + kRateMargin && !(sum.agreement > kAgreementTolerance);
      run.summary.push_back(sum);
    }
  }
  return run;
}

std::string rateSummaryCsv(std::span<const RateSummary> rows) {
  std::ostringstream out;
  out << "case,strategy,p,rate,min_rate,required,agreement,status\n";
  for (const RateSummary& r : rows) {
    out << r.caseName << ',' << strategyName(r.strategy) << ',' << r.degree << ',';
    out.precision(4);
    out << std::fixed << r.rate << ',' << r.minRate << ',' << r.degree + kRateMargin << ',';
    out.precision(3);
    out << std::scientific;
    if (std::isfinite(r.agreement)) out << r.agreement;
    out << ',' << (r.pass ? "PASS" : "FAIL") << '\n';
    out << std::defaultfloat;
  }
  return out.str();
}

TimingRecord timeFormation(const TrimmedDomain& domain, Strategy strategy, int degree, int elements,
                           int repetitions, bool parallel) {
  const Strategy one[] = {strategy};
  return timeFormations(domain, one, degree, elements, repetitions, parallel).front();
}

std::vector<TimingRecord> timeFormations(const TrimmedDomain& domain, std::span<const Strategy> strategies,
                                         int degree, int elements, int repetitions, bool parallel) {
  if (repetitions < 1) throw std::invalid_argument("repetitions must be positive");
  const TrimConfiguration cfg = classifyElements(uniformSquare(degree, elements), domain);
  const CutCellQuadrature cut = massCutQuadrature(cfg, parallel);
  const std::size_t n = strategies.size();
  std::vector<FormationReport> last(n);
  std::vector<std::vector<FormationReport>> rounds(n);
  std::vector<std::array<std::vector<double>, 5>> samples(n);
  for (int round = -1; round < repetitions; ++round) {  // round -1 is the warm-up
    for (std::size_t s = 0; s < n; ++s) {
      last[s] = formWithTimings(strategies[s], cfg, {}, cut, {parallel, true}).second;
      if (round < 0) continue;
      const FormationReport& r = last[s];
      rounds[s].push_back(r);
      const double t[5] = {r.tWeights, r.tInterior, r.tCutRegular, r.tCutElements, r.tTotal};
      for (int c = 0; c < 5; ++c) samples[s][c].push_back(t[c]);
    }
  }
  std::vector<TimingRecord> out;
  for (std::size_t s = 0; s < n; ++s) {
    TimingRecord rec{domain.name(), degree, elements, last[s], std::move(rounds[s])};
    rec.report.tWeights = median(samples[s][0]);
    rec.report.tInterior = median(samples[s][1]);
    rec.report.tCutRegular = median(samples[s][2]);
    rec.report.tCutElements = median(samples[s][3]);
    rec.report.tTotal = median(samples[s][4]);
    out.push_back(std::move(rec));
  }
  return out;
}

std::string timingCsv(std::span<const TimingRecord> rows) {
  std::ostringstream out;
  out << "strategy,case,p,h,t_weights,t_interior,t_cutRegular,t_cutElements,t_total\n";
  out.precision(6);
  for (const TimingRecord& r : rows) {
    const FormationReport& f = r.report;
    out << strategyName(f.strategy) << ',' << r.caseName << ',' << r.degree << ',' << 1.0 / r.elements << ','
        << f.tWeights << ',' << f.tInterior << ',' << f.tCutRegular << ',' << f.tCutElements << ',' << f.tTotal
        << '\n';
  }
  return out.str();
}

}  // namespace trimquad
