#include "trimquad/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "trimquad/errors.hpp"
#include "trimquad/gauss.hpp"

namespace trimquad {

double benchmarkTarget(double x, double y) { return std::sin(2.0 * x) * std::cos(3.0 * y); }

std::vector<int> retainedFunctions(const TrimConfiguration& config) {
  std::vector<int> out;
  for (int i = 0; i < config.basis.size(); ++i) {
    if (config.functions[i] != Location::Exterior) out.push_back(i);
  }
  return out;
}

namespace {

int maxDegree(const TrimConfiguration& config) {
  return std::max(config.basis.dir(0).degree(), config.basis.dir(1).degree());
}

// Calls visit(x, y, weight) for every point of an n-point rule over the valid region.
template <class F>
void forValidPoints(const TrimConfiguration& config, const CutCellQuadrature& cut, int n, F visit) {
  const GaussRule g = gaussLegendre(n);
  for (int e = 0; e < static_cast<int>(config.elements.size()); ++e) {
    if (config.elements[e] == Location::Exterior) continue;
    if (config.elements[e] == Location::Cut) {
      const CutElementRule* r = cut.find(e);
      for (std::size_t k = 0; k < r->points.size(); ++k) visit(r->points[k].x, r->points[k].y, r->weights[k]);
      continue;
    }
    const Rect box = config.elementRect(e);
    const GaussRule gx = g.mapped(box.x0, box.x1), gy = g.mapped(box.y0, box.y1);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) visit(gx.points[a], gy.points[b], gx.weights[a] * gy.weights[b]);
    }
  }
}

CutCellQuadrature cutRule(const TrimConfiguration& config, int points) {
  return cutCellQuadrature(config, std::min(maxDegree(config), kMaxCutDegree), false, points);
}

}  // namespace

Eigen::VectorXd assembleRHS(const ProjectionProblem& problem, const CutCellQuadrature* cut) {
  const TrimConfiguration& cfg = problem.config;
  const TensorBasis2D& B = cfg.basis;
  const std::vector<int> dofs = retainedFunctions(cfg);
  std::vector<int> indexOf(B.size(), -1);
  for (int k = 0; k < static_cast<int>(dofs.size()); ++k) indexOf[dofs[k]] = k;

  const int p1 = B.dir(0).degree(), p2 = B.dir(1).degree();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dofs.size()));
  std::vector<double> v1(p1 + 1), v2(p2 + 1);
  const CutCellQuadrature own = cut ? CutCellQuadrature{} : massCutQuadrature(cfg);
  forValidPoints(cfg, cut ? *cut : own, maxDegree(cfg) + 2, [&](double x, double y, double w) {
    const double s = w * problem.f(x, y) * problem.c(x, y);
    const int f1 = B.dir(0).evalNonzero(x, v1);
    const int f2 = B.dir(1).evalNonzero(y, v2);
    for (int a = 0; a <= p1; ++a) {
      for (int c = 0; c <= p2; ++c) {
        const int k = indexOf[B.flat(f1 + a, f2 + c)];
        if (k >= 0) b[k] += s * v1[a] * v2[c];
      }
    }
  });
  return b;
}

namespace {

// Largest eigenvalue of a symmetric operator by power iteration.
template <class Apply>
double powerIteration(Apply apply, Eigen::Index n) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n).normalized();
  double lambda = 0.0;
  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXd w = apply(v);
    const double next = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    if (std::abs(next - lambda) <= 1e-6 * std::abs(next)) return next;
    lambda = next;
  }
  return lambda;
}

}  // namespace

SolveResult solveSPD(const Eigen::SparseMatrix<double>& M, const Eigen::VectorXd& b, int directLimit) {
  const Eigen::Index n = M.rows();
  if (M.cols() != n || b.size() != n) throw std::invalid_argument("solveSPD: dimension mismatch");
  SolveResult out;
  if (n == 0) return out;
  const Eigen::SparseMatrix<double> Mt = M.transpose();
  if ((M - Mt).norm() > 1e-12 * M.norm()) throw NotSpdError("solveSPD: matrix is not symmetric");

  Eigen::VectorXd d = M.diagonal();
  if ((d.array() <= 0.0).any()) throw NotSpdError("solveSPD: non-positive diagonal entry");
  const Eigen::VectorXd s = d.cwiseSqrt().cwiseInverse();
  const Eigen::SparseMatrix<double> A = s.asDiagonal() * M * s.asDiagonal();
  const Eigen::VectorXd bs = s.cwiseProduct(b);

  out.direct = n <= directLimit;
  Eigen::VectorXd y;
  if (out.direct) {
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(A);
    if (llt.info() != Eigen::Success) throw NotSpdError("solveSPD: Cholesky factorization failed");
    y = llt.solve(bs);
    // Refinement with residuals in extended precision pushes y to the exact solution
    // of the stored system, so strategies differ only through their matrices.
    const Eigen::SparseMatrix<long double> Al = A.cast<long double>();
    const Eigen::Matrix<long double, Eigen::Dynamic, 1> bl = bs.cast<long double>();
    for (int it = 0; it < 3; ++it) {
      const Eigen::VectorXd r = (bl - Al * y.cast<long double>()).cast<double>();
      y += llt.solve(r);
    }
    const double lmax = powerIteration([&](const Eigen::VectorXd& v) { Eigen::VectorXd r = A * v; return r; }, n);
    const double inv = powerIteration([&](const Eigen::VectorXd& v) { Eigen::VectorXd r = llt.solve(v); return r; }, n);
    out.conditionEstimate = lmax * inv;
  } else {
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg(A);
    cg.setTolerance(1e-15);
    cg.setMaxIterations(static_cast<int>(10 * n));
    y = cg.solve(bs);
    if (cg.info() != Eigen::Success && cg.error() > 1e-13) throw NotSpdError("solveSPD: CG did not converge");
    const double lmax = powerIteration([&](const Eigen::VectorXd& v) { Eigen::VectorXd r = A * v; return r; }, n);
    cg.setTolerance(1e-10);
    const double inv = powerIteration([&](const Eigen::VectorXd& v) { Eigen::VectorXd r = cg.solve(v); return r; }, n);
    out.conditionEstimate = lmax * inv;
  }
  out.x = s.cwiseProduct(y);
  out.relativeResidual = b.norm() > 0.0 ? (M * out.x - b).norm() / b.norm() : (M * out.x).norm();
  if (out.conditionEstimate > kConditionLimit) {
    std::ostringstream msg;
    msg << "condition estimate " << out.conditionEstimate << " exceeds " << kConditionLimit;
    out.warning = msg.str();
  }
  return out;
}

double l2Error(const ProjectionProblem& problem, const Eigen::VectorXd& coeffs) {
  const TrimConfiguration& cfg = problem.config;
  const TensorBasis2D& B = cfg.basis;
  const std::vector<int> dofs = retainedFunctions(cfg);
  if (coeffs.size() != static_cast<Eigen::Index>(dofs.size())) throw std::invalid_argument("l2Error: size mismatch");
  std::vector<double> full(B.size(), 0.0);
  for (std::size_t k = 0; k < dofs.size(); ++k) full[dofs[k]] = coeffs[static_cast<Eigen::Index>(k)];

  const int p1 = B.dir(0).degree(), p2 = B.dir(1).degree();
  std::vector<double> v1(p1 + 1), v2(p2 + 1);
  // u - f cancels to the size of the error, so u and the sums carry extended precision.
  long double err = 0.0L, norm = 0.0L;
  const CutCellQuadrature cut = cutRule(cfg, 2 * maxDegree(cfg) + 3);
  forValidPoints(cfg, cut, maxDegree(cfg) + 3, [&](double x, double y, double w) {
    const int f1 = B.dir(0).evalNonzero(x, v1);
    const int f2 = B.dir(1).evalNonzero(y, v2);
    long double u = 0.0L;
    for (int a = 0; a <= p1; ++a) {
      for (int c = 0; c <= p2; ++c) {
        u += static_cast<long double>(full[B.flat(f1 + a, f2 + c)]) * v1[a] * v2[c];
      }
    }
    const long double f = problem.f(x, y);
    err += w * (u - f) * (u - f);
    norm += w * f * f;
  });
  if (!(norm > 0.0L)) throw std::domain_error("l2Error: target vanishes on the valid region");
  return static_cast<double>(std::sqrt(err / norm));
}

ProjectionResult project(const ProjectionProblem& problem, bool parallel) {
  ProjectionResult out;
  const CutCellQuadrature cut = massCutQuadrature(problem.config, parallel);
  auto [m, report] = formWithTimings(problem.strategy, problem.config, problem.c, cut, {parallel, true});
  out.mass = std::move(m);
  out.formation = report;
  out.rhs = assembleRHS(problem, &cut);
  out.solve = solveSPD(out.mass.toEigen(), out.rhs);
  out.l2 = l2Error(problem, out.solve.x);
  return out;
}

namespace {

// Cut functions with the smallest valid support, for conditioning reports.
std::string smallestTrimmedSupports(const TrimConfiguration& cfg, int count) {
  std::vector<std::pair<double, int>> area;
  const CutCellQuadrature cut = cutRule(cfg, maxDegree(cfg) + 1);
  for (const CutFunction& cf : cfg.cutFunctions) {
    double a = 0.0;
    for (int e : cf.regular) a += cfg.elementRect(e).area();
    for (int e : cf.trimmed) a += cut.find(e)->area();
    area.emplace_back(a, cf.function);
  }
  std::sort(area.begin(), area.end());
  std::ostringstream out;
  for (int k = 0; k < std::min<int>(count, static_cast<int>(area.size())); ++k) {
    const auto [i1, i2] = cfg.basis.split(area[k].second);
    out << (k ? ", " : "") << "(" << i1 << "," << i2 << ") valid support " << area[k].first;
  }
  return out.str();
}

}  // namespace

std::vector<ConvergenceRecord> runConvergenceStudy(const TrimmedDomain& domain, Strategy strategy,
                                                   std::span<const int> degrees, std::span<const int> meshes,
                                                   const StudyOptions& options) {
  std::vector<ConvergenceRecord> out;
  for (int p : degrees) {
    double prevError = 0.0, prevH = 0.0;
    for (int n : meshes) {
      const TensorBasis2D basis(Basis1D(KnotVector::uniform(p, n)), Basis1D(KnotVector::uniform(p, n)));
      const TrimConfiguration cfg = classifyElements(basis, domain);
      const ProjectionResult r = project({cfg, options.f, {}, strategy}, options.parallel);
      if (r.solve.conditionEstimate > options.conditionLimit) {
        std::ostringstream msg;
        msg << "condition estimate " << r.solve.conditionEstimate << " exceeds " << options.conditionLimit;
        throw ConfigurationError(msg.str() + " at p=" + std::to_string(p) + ", " + std::to_string(n) +
                                 " elements; smallest trimmed supports: " + smallestTrimmedSupports(cfg, 3));
      }
      ConvergenceRecord rec;
      rec.caseName = domain.name();
      rec.strategy = strategy;
      rec.degree = p;
      rec.elements = n;
      rec.h = 1.0 / n;
      rec.dofs = r.mass.size();
      rec.l2 = r.l2;
      rec.rate = prevH > 0.0 ? std::log(prevError / r.l2) / std::log(prevH / rec.h)
                             : std::numeric_limits<double>::quiet_NaN();
      rec.condition = r.solve.conditionEstimate;
      out.push_back(rec);
      prevError = r.l2;
      prevH = rec.h;
    }
  }
  return out;
}

std::string convergenceCsv(std::span<const ConvergenceRecord> records) {
  std::ostringstream out;
  out << "case,strategy,p,h,dofs,l2_rel,rate\n";
  out.precision(17);
  for (const ConvergenceRecord& r : records) {
    out << r.caseName << ',' << strategyName(r.strategy) << ',' << r.degree << ',' << r.h << ',' << r.dofs << ','
        << r.l2 << ',';
    if (std::isfinite(r.rate)) out << r.rate;
    out << '\n';
  }
  return out.str();
}

}  // namespace trimquad
