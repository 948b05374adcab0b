#pragma once

#include <span>
#include <string>
#include <vector>

#include "trimquad/projection.hpp"

namespace trimquad {

/// Deviation of the fast strategies from the Gauss reference, one row per degree.
struct MassTableRow {
  int degree = 0;
  double referenceNorm = 0.0;  ///< ||M_ref||_F
  /// Absolute and relative Frobenius distances, indexed wq, hybrid, dwq.
  double absolute[3] = {0.0, 0.0, 0.0};
  double relative[3] = {0.0, 0.0, 0.0};
};

inline constexpr Strategy kFastStrategies[] = {Strategy::WQ, Strategy::Hybrid, Strategy::DWQ};

std::vector<MassTableRow> massMatrixTable(const TrimmedDomain& domain, std::span<const int> degrees,
                                          int elements = 10, bool parallel = false);
/// p,ref_norm,wq_abs,wq_rel,hybrid_abs,hybrid_rel,dwq_abs,dwq_rel
std::string massTableCsv(std::span<const MassTableRow> rows);

/// Finest-pair rate of one (strategy, p) series and its agreement with the reference.
struct RateSummary {
  std::string caseName;
  Strategy strategy = Strategy::Reference;
  int degree = 0;
  double rate = 0.0;      ///< between the two finest meshes
  double minRate = 0.0;   ///< over all consecutive pairs
  double agreement = 0.0; ///< max_h |e - e_ref| / e_ref; 0 for the reference itself
  bool pass = false;      ///< rate >= p + 0.8 and agreement <= 1e-10
};

inline constexpr double kRateMargin = 0.8;
inline constexpr double kAgreementTolerance = 1e-10;

struct ConvergenceRun {
  std::vector<ConvergenceRecord> records;
  std::vector<RateSummary> summary;
};

/// Convergence study for several strategies on one case. Naive WQ is rejected
/// (std::invalid_argument): its mass matrix is not positive definite.
ConvergenceRun runConvergence(const TrimmedDomain& domain, std::span<const Strategy> strategies,
                              std::span<const int> degrees, std::span<const int> meshes,
                              const StudyOptions& options = {});
/// case,strategy,p,rate,min_rate,required,agreement,status
std::string rateSummaryCsv(std::span<const RateSummary> rows);

struct TimingRecord {
  std::string caseName;
  int degree = 0;
  int elements = 0;
  FormationReport report;  ///< component-wise medians
  std::vector<FormationReport> rounds;  ///< raw samples; round k of every strategy ran back to back
};

/// Median formation times over `repetitions` runs after one warm-up run.
TimingRecord timeFormation(const TrimmedDomain& domain, Strategy strategy, int degree, int elements,
                           int repetitions = 5, bool parallel = false);
/// Same for several strategies on one configuration. Runs are interleaved (one run of
/// each strategy per round) so that drift in machine speed hits all of them alike.
std::vector<TimingRecord> timeFormations(const TrimmedDomain& domain, std::span<const Strategy> strategies,
                                         int degree, int elements, int repetitions = 5, bool parallel = false);
/// strategy,case,p,h,t_weights,t_interior,t_cutRegular,t_cutElements,t_total
std::string timingCsv(std::span<const TimingRecord> rows);

}  // namespace trimquad
