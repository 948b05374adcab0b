#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "trimquad/assembly.hpp"

namespace trimquad {

using ScalarField = std::function<double(double, double)>;

/// sin(2x) cos(3y).
double benchmarkTarget(double x, double y);

/// L2 projection of f onto the retained functions of a trimmed space (x = u1, y = u2).
struct ProjectionProblem {
  const TrimConfiguration& config;
  ScalarField f = benchmarkTarget;
  CoefficientField c{};
  Strategy strategy = Strategy::Hybrid;
};

/// Non-exterior functions in ascending flat index: the unknowns of the system.
std::vector<int> retainedFunctions(const TrimConfiguration& config);

/// b_i = int_{valid} f B_i c, with (p+2)-point Gauss on interior elements and the
/// mass-matrix cut rule on cut elements (massCutQuadrature unless `cut` is given), so
/// that b = M a holds to roundoff when f is a spline of the space.
Eigen::VectorXd assembleRHS(const ProjectionProblem& problem, const CutCellQuadrature* cut = nullptr);

struct SolveResult {
  Eigen::VectorXd x;
  double relativeResidual = 0.0;
  double conditionEstimate = 0.0;  ///< of the Jacobi-scaled matrix
  bool direct = true;
  std::string warning;  ///< set when the condition estimate exceeds kConditionLimit
};

inline constexpr double kConditionLimit = 1e12;
/// Systems up to this size are factorized; larger ones use preconditioned CG.
inline constexpr int kDirectSolveLimit = 20000;

/// Jacobi-scaled Cholesky (n <= directLimit) or Jacobi-preconditioned CG.
/// Throws NotSpdError if M is not symmetric positive definite.
SolveResult solveSPD(const Eigen::SparseMatrix<double>& M, const Eigen::VectorXd& b,
                     int directLimit = kDirectSolveLimit);

/// sqrt(int (u_h - f)^2 / int f^2) over the valid region: p+3 points per direction on
/// interior elements, 2p+3 per sub-cell direction on cut elements.
/// Throws std::domain_error if f vanishes on the valid region.
double l2Error(const ProjectionProblem& problem, const Eigen::VectorXd& coeffs);

struct ProjectionResult {
  SparseMatrix mass;
  FormationReport formation;
  Eigen::VectorXd rhs;
  SolveResult solve;
  double l2 = 0.0;
};

ProjectionResult project(const ProjectionProblem& problem, bool parallel = false);

struct ConvergenceRecord {
  std::string caseName;
  Strategy strategy = Strategy::Reference;
  int degree = 0;
  int elements = 0;
  double h = 0.0;
  int dofs = 0;
  double l2 = 0.0;
  double rate = 0.0;  ///< log(e_prev / e) / log(h_prev / h); NaN on the coarsest mesh
  double condition = 0.0;
};

struct StudyOptions {
  ScalarField f = benchmarkTarget;
  bool parallel = false;
  double conditionLimit = kConditionLimit;
};

/// Projection of f on uniform meshes over a trimmed domain. Aborts with a
/// ConfigurationError naming the smallest trimmed supports if a condition
/// estimate exceeds options.conditionLimit.
std::vector<ConvergenceRecord> runConvergenceStudy(const TrimmedDomain& domain, Strategy strategy,
                                                   std::span<const int> degrees, std::span<const int> meshes,
                                                   const StudyOptions& options = {});

/// CSV with header case,strategy,p,h,dofs,l2_rel,rate (rate empty on the coarsest mesh).
std::string convergenceCsv(std::span<const ConvergenceRecord> records);

}  // namespace trimquad
