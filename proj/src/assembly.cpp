#include "trimquad/assembly.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>

#include "trimquad/gauss.hpp"

namespace trimquad {

CoefficientGrid::CoefficientGrid(const CoefficientField& c, std::span<const double> p1, std::span<const double> p2,
                                 int o1, int o2)
    : n1(static_cast<int>(p1.size())),
      n2(static_cast<int>(p2.size())),
      offset1(o1),
      offset2(o2),
      values(p1.size() * p2.size(), 1.0) {
  if (c.isUnit()) return;
  for (int a = 0; a < n1; ++a) {
    for (int b = 0; b < n2; ++b) values[static_cast<std::size_t>(a) * n2 + b] = c(p1[a], p2[b]);
  }
}

void CoefficientGrid::zeroOutside(const TrimConfiguration& config, const PointLayout& l1, const PointLayout& l2) {
  for (int a = 0; a < n1; ++a) {
    for (int b = 0; b < n2; ++b) {
      const Location l = config.elements[config.basis.flatElement(l1.elementOfPoint[a], l2.elementOfPoint[b])];
      const bool valid = l == Location::Interior ||
                         (l == Location::Cut && config.domain.inside({l1.points[a], l2.points[b]}));
      if (!valid) values[static_cast<std::size_t>(a) * n2 + b] = 0.0;
    }
  }
}

double* SparseMatrix::find(int r, int c) {
  const auto b = columns.begin() + rowStart[r];
  const auto e = columns.begin() + rowStart[r + 1];
  const auto it = std::lower_bound(b, e, c);
  return (it != e && *it == c) ? &values[it - columns.begin()] : nullptr;
}

double SparseMatrix::at(int r, int c) const {
  const auto b = columns.begin() + rowStart[r];
  const auto e = columns.begin() + rowStart[r + 1];
  const auto it = std::lower_bound(b, e, c);
  return (it != e && *it == c) ? values[it - columns.begin()] : 0.0;
}

void SparseMatrix::symmetrize() {
  for (int r = 0; r < size(); ++r) {
    for (int k = rowStart[r]; k < rowStart[r + 1]; ++k) {
      const int c = columns[k];
      if (c <= r) continue;
      double* t = find(c, r);
      const double m = 0.5 * (values[k] + (t ? *t : 0.0));
      values[k] = m;
      if (t) *t = m;
    }
  }
}

double SparseMatrix::frobenius() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(s);
}

double SparseMatrix::asymmetry() const {
  double s = 0.0;
  for (int r = 0; r < size(); ++r) {
    for (int k = rowStart[r]; k < rowStart[r + 1]; ++k) {
      const double d = values[k] - at(columns[k], r);
      s += d * d;
    }
  }
  const double f = frobenius();
  return f > 0.0 ? std::sqrt(s) / f : std::sqrt(s);
}

bool SparseMatrix::sameStructure(const SparseMatrix& o) const {
  return functions == o.functions && rowStart == o.rowStart && columns == o.columns;
}

Eigen::SparseMatrix<double> SparseMatrix::toEigen() const {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(values.size());
  for (int r = 0; r < size(); ++r) {
    for (int k = rowStart[r]; k < rowStart[r + 1]; ++k) t.emplace_back(r, columns[k], values[k]);
  }
  Eigen::SparseMatrix<double> m(size(), size());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

Eigen::MatrixXd SparseMatrix::toDense() const { return Eigen::MatrixXd(toEigen()); }

SparseMatrix overlapPattern(const TrimConfiguration& config) {
  const TensorBasis2D& b = config.basis;
  SparseMatrix m;
  m.indexOf.assign(b.size(), -1);
  for (int i = 0; i < b.size(); ++i) {
    if (config.functions[i] == Location::Exterior) continue;
    m.indexOf[i] = m.size();
    m.functions.push_back(i);
  }
  m.rowStart.push_back(0);
  for (int i : m.functions) {
    const auto [i1, i2] = b.split(i);
    const auto [a1, b1] = b.dir(0).overlappingRange(i1);
    const auto [a2, b2] = b.dir(1).overlappingRange(i2);
    for (int j1 = a1; j1 <= b1; ++j1) {
      for (int j2 = a2; j2 <= b2; ++j2) {
        const int c = m.indexOf[b.flat(j1, j2)];
        if (c >= 0) m.columns.push_back(c);
      }
    }
    m.rowStart.push_back(static_cast<int>(m.columns.size()));
  }
  m.values.assign(m.columns.size(), 0.0);
  return m;
}

double frobeniusDistance(const SparseMatrix& a, const SparseMatrix& b) {
  if (!a.sameStructure(b)) throw std::invalid_argument("frobeniusDistance: different sparsity patterns");
  double s = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) s += (a.values[k] - b.values[k]) * (a.values[k] - b.values[k]);
  return std::sqrt(s);
}

RowBlock::RowBlock(const TensorBasis2D& basis, int test) {
  const auto [i1, i2] = basis.split(test);
  const auto r1 = basis.dir(0).overlappingRange(i1);
  const auto r2 = basis.dir(1).overlappingRange(i2);
  j1 = r1.first;
  j2 = r2.first;
  n1 = r1.second - r1.first + 1;
  n2 = r2.second - r2.first + 1;
  values.assign(static_cast<std::size_t>(n1) * n2, 0.0);
}

RowBlock& RowBlock::operator+=(const RowBlock& o) {
  if (o.j1 != j1 || o.j2 != j2 || o.n1 != n1 || o.n2 != n2) throw std::invalid_argument("RowBlock: shape mismatch");
  for (std::size_t k = 0; k < values.size(); ++k) values[k] += o.values[k];
  return *this;
}

void storeRow(SparseMatrix& m, int r, const RowBlock& block, const TensorBasis2D& basis) {
  for (int k = m.rowStart[r]; k < m.rowStart[r + 1]; ++k) {
    const auto [j1, j2] = basis.split(m.functions[m.columns[k]]);
    m.values[k] = block.get(j1, j2);
  }
}

RowBlock sumFactorRow(const TensorBasis2D& basis, int test, const DirectionalRule& r1, const DirectionalRule& r2,
                      const CoefficientGrid& grid, ContractionOrder order, OperationCount* ops) {
  RowBlock block(basis, test);
  const int p1 = basis.dir(0).degree();
  const int p2 = basis.dir(1).degree();
  OperationCount count;

  if (order == ContractionOrder::Direction2Inner) {
    // t(k1, j2) = sum_k2 w2 c B_j2, then m(j1, j2) = sum_k1 w1 B_j1 t(k1, j2).
    std::vector<double> t(static_cast<std::size_t>(block.n2));
    for (int k1 = r1.begin; k1 < r1.end; ++k1) {
      std::fill(t.begin(), t.end(), 0.0);
      for (int k2 = r2.begin; k2 < r2.end; ++k2) {
        const double s = r2.weights->at(k2) * grid.at(k1, k2);
        const auto v = r2.values->at(k2);
        const int f = r2.values->first[k2] - block.j2;
        for (int a = 0; a <= p2; ++a) t[f + a] += s * v[a];
      }
      count.inner += static_cast<long long>(r2.end - r2.begin) * (p2 + 1);
      const double w = r1.weights->at(k1);
      const auto v = r1.values->at(k1);
      const int f = r1.values->first[k1] - block.j1;
      for (int a = 0; a <= p1; ++a) {
        const double s = w * v[a];
        double* row = &block.values[static_cast<std::size_t>(f + a) * block.n2];
        for (int b = 0; b < block.n2; ++b) row[b] += s * t[b];
      }
      count.outer += static_cast<long long>(p1 + 1) * block.n2;
    }
  } else {
    std::vector<double> t(static_cast<std::size_t>(block.n1));
    for (int k2 = r2.begin; k2 < r2.end; ++k2) {
      std::fill(t.begin(), t.end(), 0.0);
      for (int k1 = r1.begin; k1 < r1.end; ++k1) {
        const double s = r1.weights->at(k1) * grid.at(k1, k2);
        const auto v = r1.values->at(k1);
        const int f = r1.values->first[k1] - block.j1;
        for (int a = 0; a <= p1; ++a) t[f + a] += s * v[a];
      }
      count.inner += static_cast<long long>(r1.end - r1.begin) * (p1 + 1);
      const double w = r2.weights->at(k2);
      const auto v = r2.values->at(k2);
      const int f = r2.values->first[k2] - block.j2;
      for (int a = 0; a <= p2; ++a) {
        const double s = w * v[a];
        for (int b = 0; b < block.n1; ++b) block.values[static_cast<std::size_t>(b) * block.n2 + f + a] += s * t[b];
      }
      count.outer += static_cast<long long>(p2 + 1) * block.n1;
    }
  }
  if (ops) *ops = count;
  return block;
}

const char* strategyName(Strategy s) {
  switch (s) {
    case Strategy::Reference: return "reference";
    case Strategy::WQ: return "wq";
    case Strategy::Hybrid: return "hybrid";
    case Strategy::DWQ: return "dwq";
  }
  return "?";
}

Strategy strategyFromName(const std::string& name) {
  for (Strategy s : kAllStrategies) {
    if (name == strategyName(s)) return s;
  }
  throw std::invalid_argument("unknown strategy '" + name + "' (reference|wq|hybrid|dwq)");
}

CutCellQuadrature massCutQuadrature(const TrimConfiguration& config, bool parallel) {
  const int p = std::max(config.basis.dir(0).degree(), config.basis.dir(1).degree());
  // Straight sub-cells are bilinear images that mix the two directions, so a
  // tensor-degree-2p integrand has degree 4p+1 along each reference axis.
  return cutCellQuadrature(config, std::min(p, kMaxCutDegree), parallel, 2 * p + 1);
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Gauss points of every element of one direction with the p+1 non-zero basis values.
struct GaussTable {
  int n = 0;  // points per element
  int p = 0;
  std::vector<double> points, weights, values;
  std::vector<int> first;

  GaussTable(const Basis1D& basis, int count) : n(count), p(basis.degree()) {
    const GaussRule g = gaussLegendre(count);
    for (const Element& e : basis.elements()) {
      const GaussRule m = g.mapped(e.a, e.b);
      for (int k = 0; k < n; ++k) {
        points.push_back(m.points[k]);
        weights.push_back(m.weights[k]);
        values.resize(values.size() + static_cast<std::size_t>(p + 1));
        first.push_back(basis.evalNonzero(m.points[k], std::span<double>(values).last(static_cast<std::size_t>(p + 1))));
      }
    }
  }
  const double* at(int k) const { return &values[static_cast<std::size_t>(k) * (p + 1)]; }
};

// Cut-cell points with basis values and weight times c.
struct EvaluatedCutRule {
  std::vector<double> wc;
  std::vector<int> first1, first2;
  std::vector<double> v1, v2;
};

class Former {
 public:
  Former(const TrimConfiguration& config, const CoefficientField& c, const CutCellQuadrature& cut,
         FormationOptions options)
      : cfg_(config), b_(config.basis), c_(c), cut_(cut), opt_(options) {}

  std::pair<SparseMatrix, FormationReport> run(Strategy s) {
    report_.strategy = s;
    m_ = overlapPattern(cfg_);
    const auto t0 = Clock::now();
    switch (s) {
      case Strategy::Reference: reference(); break;
      case Strategy::WQ: naive(); break;
      case Strategy::Hybrid: hybrid(); break;
      case Strategy::DWQ: discontinuous(); break;
    }
    if (opt_.symmetrize) m_.symmetrize();
    report_.tTotal = since(t0);
    return {std::move(m_), report_};
  }

 private:
  int p(int d) const { return b_.dir(d).degree(); }

  // Runs body(r) over the given rows, concurrently if requested.
  template <class F>
  void forRows(const std::vector<int>& rows, F body) {
    std::exception_ptr failure;
    const int n = static_cast<int>(rows.size());
#pragma omp parallel for schedule(dynamic, 8) if (opt_.parallel)
    for (int k = 0; k < n; ++k) {
      try {
        body(rows[k]);
      } catch (...) {
#pragma omp critical(trimquad_row_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  void splitRows() {
    for (int r = 0; r < m_.size(); ++r) {
      (cfg_.functions[m_.functions[r]] == Location::Interior ? interiorRows_ : cutRows_).push_back(r);
    }
  }

  void buildWQ() {
    for (int d = 0; d < 2; ++d) {
      wq_[d] = buildWQRules(b_.dir(d), d, opt_.parallel);
      wqValues_[d] = EvaluatedLayout(b_.dir(d), wq_[d]->layout.points);
      report_.wqPoints[d] = wq_[d]->layout.size();
    }
    grid_ = CoefficientGrid(c_, wq_[0]->layout.points, wq_[1]->layout.points);
  }

  DirectionalRule wqRule(int d, int i) const {
    const WeightRow& w = wq_[d]->rows[i];
    return {&w, &wqValues_[d], w.firstPoint, w.endPoint()};
  }

  RowBlock wqRow(int f, const CoefficientGrid& grid) const {
    const auto [i1, i2] = b_.split(f);
    return sumFactorRow(b_, f, wqRule(0, i1), wqRule(1, i2), grid);
  }

  void gaussTables() {
    for (int d = 0; d < 2; ++d) gauss_[d] = std::make_unique<GaussTable>(b_.dir(d), p(d) + 1);
  }

  // Row f integrated by tensor Gauss over one element.
  void gaussElement(RowBlock& block, int f, int e) const {
    const auto [i1, i2] = b_.split(f);
    const auto [e1, e2] = b_.splitElement(e);
    const GaussTable& g1 = *gauss_[0];
    const GaussTable& g2 = *gauss_[1];
    for (int a = e1 * g1.n; a < (e1 + 1) * g1.n; ++a) {
      const int o1 = i1 - g1.first[a];
      if (o1 < 0 || o1 > g1.p) continue;
      const double* v1 = g1.at(a);
      const double s1 = g1.weights[a] * v1[o1];
      for (int b = e2 * g2.n; b < (e2 + 1) * g2.n; ++b) {
        const int o2 = i2 - g2.first[b];
        if (o2 < 0 || o2 > g2.p) continue;
        const double* v2 = g2.at(b);
        const double s = s1 * g2.weights[b] * v2[o2] * c_(g1.points[a], g2.points[b]);
        for (int x = 0; x <= g1.p; ++x) {
          const double t = s * v1[x];
          double* row = &block(g1.first[a] + x, g2.first[b]);
          for (int y = 0; y <= g2.p; ++y) row[y] += t * v2[y];
        }
      }
    }
  }

  void evaluateCutRules() {
    cutValues_.resize(cut_.rules.size());
    for (std::size_t r = 0; r < cut_.rules.size(); ++r) {
      const CutElementRule& rule = cut_.rules[r];
      EvaluatedCutRule& ev = cutValues_[r];
      const std::size_t n = rule.points.size();
      ev.wc.resize(n);
      ev.first1.resize(n);
      ev.first2.resize(n);
      ev.v1.resize(n * (p(0) + 1));
      ev.v2.resize(n * (p(1) + 1));
      for (std::size_t k = 0; k < n; ++k) {
        const Point2 x = rule.points[k];
        ev.wc[k] = rule.weights[k] * c_(x.x, x.y);
        ev.first1[k] = b_.dir(0).evalNonzero(x.x, std::span<double>(ev.v1).subspan(k * (p(0) + 1), p(0) + 1));
        ev.first2[k] = b_.dir(1).evalNonzero(x.y, std::span<double>(ev.v2).subspan(k * (p(1) + 1), p(1) + 1));
      }
      report_.cutPoints += static_cast<long long>(n);
    }
  }

  void cutElement(RowBlock& block, int f, int e) const {
    const int r = cut_.ruleOf[e];
    if (r < 0) throw std::logic_error("no cut-cell rule for a cut element");
    const EvaluatedCutRule& ev = cutValues_[r];
    const auto [i1, i2] = b_.split(f);
    const int q1 = p(0) + 1, q2 = p(1) + 1;
    for (std::size_t k = 0; k < ev.wc.size(); ++k) {
      const int o1 = i1 - ev.first1[k];
      const int o2 = i2 - ev.first2[k];
      if (o1 < 0 || o1 >= q1 || o2 < 0 || o2 >= q2) continue;
      const double* v1 = &ev.v1[k * q1];
      const double* v2 = &ev.v2[k * q2];
      const double s = ev.wc[k] * v1[o1] * v2[o2];
      for (int x = 0; x < q1; ++x) {
        double* row = &block(ev.first1[k] + x, ev.first2[k]);
        for (int y = 0; y < q2; ++y) row[y] += s * v1[x] * v2[y];
      }
    }
  }

  // Adds the cut-element contributions of all cut rows (timed separately).
  void cutElementsOfCutRows() {
    const auto t0 = Clock::now();
    evaluateCutRules();
    forRows(cutRows_, [&](int r) {
      const int f = m_.functions[r];
      const CutFunction* cf = cfg_.cutFunction(f);
      RowBlock block(b_, f);
      for (int e : cf->trimmed) cutElement(block, f, e);
      addRow(r, block);
    });
    report_.tCutElements += since(t0);
  }

  void addRow(int r, const RowBlock& block) {
    for (int k = m_.rowStart[r]; k < m_.rowStart[r + 1]; ++k) {
      const auto [j1, j2] = b_.split(m_.functions[m_.columns[k]]);
      m_.values[k] += block.get(j1, j2);
    }
  }

  void interiorWQ(const CoefficientGrid& grid) {
    const auto t0 = Clock::now();
    forRows(interiorRows_, [&](int r) { storeRow(m_, r, wqRow(m_.functions[r], grid), b_); });
    report_.tInterior += since(t0);
  }

  void cutGaussRegular(const std::vector<int>& rows, bool discontinuousBoxes) {
    auto elementsOf = [&](int r) -> const std::vector<int>& {
      const CutFunction* cf = cfg_.cutFunction(m_.functions[r]);
      return discontinuousBoxes && cf->hasBox ? cf->gaussElements : cf->regular;
    };
    forRows(rows, [&](int r) {
      const int f = m_.functions[r];
      RowBlock block(b_, f);
      for (int e : elementsOf(r)) gaussElement(block, f, e);
      addRow(r, block);
    });
    std::vector<char> touched(cfg_.elements.size(), 0);
    for (int r : rows) {
      for (int e : elementsOf(r)) {
        touched[e] = 1;
        report_.gaussPoints += static_cast<long long>(gauss_[0]->n) * gauss_[1]->n;
      }
    }
    for (char t : touched) report_.gaussElements += t;
  }

  void reference() {
    auto t0 = Clock::now();
    gaussTables();
    const int n1 = gauss_[0]->n, n2 = gauss_[1]->n;
    const int q1 = p(0) + 1, q2 = p(1) + 1;
    std::vector<double> local(static_cast<std::size_t>(q1 * q2 * q1 * q2));
    std::vector<double> v(static_cast<std::size_t>(q1 * q2));
    for (int e = 0; e < static_cast<int>(cfg_.elements.size()); ++e) {
      if (cfg_.elements[e] != Location::Interior) continue;
      const auto [e1, e2] = b_.splitElement(e);
      std::fill(local.begin(), local.end(), 0.0);
      for (int a = e1 * n1; a < (e1 + 1) * n1; ++a) {
        for (int b = e2 * n2; b < (e2 + 1) * n2; ++b) {
          const double w = gauss_[0]->weights[a] * gauss_[1]->weights[b] *
                           c_(gauss_[0]->points[a], gauss_[1]->points[b]);
          for (int x = 0; x < q1; ++x) {
            for (int y = 0; y < q2; ++y) v[x * q2 + y] = gauss_[0]->at(a)[x] * gauss_[1]->at(b)[y];
          }
          for (int s = 0; s < q1 * q2; ++s) {
            const double ws = w * v[s];
            for (int t = 0; t < q1 * q2; ++t) local[s * q1 * q2 + t] += ws * v[t];
          }
        }
      }
      const int f1 = b_.dir(0).firstFunctionOn(e1), f2 = b_.dir(1).firstFunctionOn(e2);
      scatter(local, f1, f2);
      report_.gaussPoints += static_cast<long long>(n1) * n2;
    }
    report_.tInterior += since(t0);

    t0 = Clock::now();
    evaluateCutRules();
    for (std::size_t r = 0; r < cut_.rules.size(); ++r) {
      const EvaluatedCutRule& ev = cutValues_[r];
      std::fill(local.begin(), local.end(), 0.0);
      const auto [e1, e2] = b_.splitElement(cut_.rules[r].element);
      const int f1 = b_.dir(0).firstFunctionOn(e1), f2 = b_.dir(1).firstFunctionOn(e2);
      for (std::size_t k = 0; k < ev.wc.size(); ++k) {
        // A point on an element edge may report the neighbouring span; the functions
        // outside this element vanish there.
        const int d1 = ev.first1[k] - f1, d2 = ev.first2[k] - f2;
        for (int x = 0; x < q1; ++x) {
          for (int y = 0; y < q2; ++y) {
            const int lx = x - d1, ly = y - d2;
            v[x * q2 + y] = (lx >= 0 && lx < q1 && ly >= 0 && ly < q2) ? ev.v1[k * q1 + lx] * ev.v2[k * q2 + ly] : 0.0;
          }
        }
        for (int s = 0; s < q1 * q2; ++s) {
          const double ws = ev.wc[k] * v[s];
          for (int t = 0; t < q1 * q2; ++t) local[s * q1 * q2 + t] += ws * v[t];
        }
      }
      scatter(local, f1, f2);
    }
    report_.tCutElements += since(t0);
  }

  void scatter(const std::vector<double>& local, int f1, int f2) {
    const int q1 = p(0) + 1, q2 = p(1) + 1;
    for (int s = 0; s < q1 * q2; ++s) {
      const int r = m_.indexOf[b_.flat(f1 + s / q2, f2 + s % q2)];
      if (r < 0) continue;
      for (int t = 0; t < q1 * q2; ++t) {
        const int c = m_.indexOf[b_.flat(f1 + t / q2, f2 + t % q2)];
        if (c < 0) continue;
        *m_.find(r, c) += local[s * q1 * q2 + t];
      }
    }
  }

  void naive() {
    auto t0 = Clock::now();
    splitRows();
    buildWQ();
    CoefficientGrid masked = grid_;
    masked.zeroOutside(cfg_, wq_[0]->layout, wq_[1]->layout);
    report_.tWeights += since(t0);

    interiorWQ(masked);
    t0 = Clock::now();
    forRows(cutRows_, [&](int r) { storeRow(m_, r, wqRow(m_.functions[r], masked), b_); });
    report_.tCutRegular += since(t0);
  }

  void hybrid() {
    auto t0 = Clock::now();
    splitRows();
    buildWQ();
    report_.tWeights += since(t0);

    interiorWQ(grid_);
    t0 = Clock::now();
    gaussTables();
    cutGaussRegular(cutRows_, false);
    report_.tCutRegular += since(t0);
    cutElementsOfCutRows();
  }

  void discontinuous() {
    auto t0 = Clock::now();
    splitRows();
    buildWQ();
    // One rule set per discontinuity location and direction.
    for (int d = 0; d < 2; ++d) {
      const std::vector<double>& locs = cfg_.discontinuities[d];
      dwq_[d].resize(locs.size());
      dwqValues_[d].resize(locs.size());
      std::exception_ptr failure;
      const int n = static_cast<int>(locs.size());
#pragma omp parallel for schedule(dynamic) if (opt_.parallel)
      for (int k = 0; k < n; ++k) {
        try {
          dwq_[d][k] = std::make_unique<DiscontinuousRuleSet>(buildDWQ(b_.dir(d), wq_[d]->layout, locs[k], d));
          const DiscontinuousRuleSet& set = *dwq_[d][k];
          int w0 = set.layout.size(), w1 = 0;
          for (const WeightRow& row : set.rows) {
            if (row.empty()) continue;
            w0 = std::min(w0, row.firstPoint);
            w1 = std::max(w1, row.endPoint());
          }
          dwqValues_[d][k] = EvaluatedLayout(b_.dir(d), set.layout.points, w0, w1);
        } catch (...) {
#pragma omp critical(trimquad_dwq_failure)
          if (!failure) failure = std::current_exception();
        }
      }
      if (failure) std::rethrow_exception(failure);
      report_.dwqRuleSets += n;
    }
    // Coefficient grids for the layout combinations that occur, each over the
    // window of points its rows use.
    std::vector<int> boxed, fallback;
    std::vector<std::array<int, 2>> variantOf(m_.size(), {-1, -1});
    std::vector<std::array<std::pair<int, int>, 2>> rangeOf(m_.size());
    std::map<std::array<int, 2>, std::array<std::pair<int, int>, 2>> window;
    for (int r : cutRows_) {
      const int f = m_.functions[r];
      const CutFunction* cf = cfg_.cutFunction(f);
      if (!cf->dwqEligible) {
        fallback.push_back(r);
        continue;
      }
      boxed.push_back(r);
      if (!cf->hasBox) continue;
      const auto idx = b_.split(f);
      for (int d = 0; d < 2; ++d) {
        if (cf->discontinuities[d].empty()) {
          variantOf[r][d] = 0;
          rangeOf[r][d] = {wq_[d]->rows[idx[d]].firstPoint, wq_[d]->rows[idx[d]].endPoint()};
        } else {
          variantOf[r][d] = 1 + locationIndex(d, cf->discontinuities[d][0]);
          rangeOf[r][d] = dwq_[d][variantOf[r][d] - 1]->sideRange(idx[d], cf->regularSide[d]);
        }
      }
      auto [it, fresh] = window.try_emplace(variantOf[r], rangeOf[r]);
      if (!fresh) {
        for (int d = 0; d < 2; ++d) {
          it->second[d].first = std::min(it->second[d].first, rangeOf[r][d].first);
          it->second[d].second = std::max(it->second[d].second, rangeOf[r][d].second);
        }
      }
    }
    for (const auto& [key, w] : window) {
      const auto p1 = std::span<const double>(layoutOf(0, key[0]).points).subspan(w[0].first, w[0].second - w[0].first);
      const auto p2 = std::span<const double>(layoutOf(1, key[1]).points).subspan(w[1].first, w[1].second - w[1].first);
      grids_.emplace(key, CoefficientGrid(c_, p1, p2, w[0].first, w[1].first));
    }
    report_.dwqRows = static_cast<int>(boxed.size());
    report_.fallbackRows = static_cast<int>(fallback.size());
    report_.tWeights += since(t0);

    interiorWQ(grid_);

    t0 = Clock::now();
    gaussTables();
    forRows(boxed, [&](int r) {
      if (variantOf[r][0] < 0) return;
      const int f = m_.functions[r];
      const auto idx = b_.split(f);
      DirectionalRule rules[2];
      for (int d = 0; d < 2; ++d) {
        const int v = variantOf[r][d];
        const auto [k0, k1] = rangeOf[r][d];
        if (v == 0) {
          rules[d] = {&wq_[d]->rows[idx[d]], &wqValues_[d], k0, k1};
        } else {
          rules[d] = {&dwq_[d][v - 1]->rows[idx[d]], &dwqValues_[d][v - 1], k0, k1};
        }
      }
      storeRow(m_, r, sumFactorRow(b_, f, rules[0], rules[1], grids_.at(variantOf[r])), b_);
    });
    cutGaussRegular(cutRows_, true);
    report_.tCutRegular += since(t0);
    cutElementsOfCutRows();
  }

  int locationIndex(int d, double u) const {
    const std::vector<double>& locs = cfg_.discontinuities[d];
    const auto it = std::lower_bound(locs.begin(), locs.end(), u - kKnotTolerance);
    if (it == locs.end() || std::abs(*it - u) > kKnotTolerance) throw std::logic_error("unknown discontinuity");
    return static_cast<int>(it - locs.begin());
  }

  const PointLayout& layoutOf(int d, int variant) const {
    return variant == 0 ? wq_[d]->layout : dwq_[d][variant - 1]->layout;
  }

  const TrimConfiguration& cfg_;
  const TensorBasis2D& b_;
  const CoefficientField& c_;
  const CutCellQuadrature& cut_;
  FormationOptions opt_;
  FormationReport report_;
  SparseMatrix m_;
  std::vector<int> interiorRows_, cutRows_;

  std::optional<WeightedRuleSet> wq_[2];
  EvaluatedLayout wqValues_[2];
  CoefficientGrid grid_;
  std::vector<std::unique_ptr<DiscontinuousRuleSet>> dwq_[2];
  std::vector<EvaluatedLayout> dwqValues_[2];
  std::map<std::array<int, 2>, CoefficientGrid> grids_;
  std::unique_ptr<GaussTable> gauss_[2];
  std::vector<EvaluatedCutRule> cutValues_;
};

}  // namespace

std::pair<SparseMatrix, FormationReport> formWithTimings(Strategy strategy, const TrimConfiguration& config,
                                                         const CoefficientField& c, const CutCellQuadrature& cut,
                                                         FormationOptions options) {
  return Former(config, c, cut, options).run(strategy);
}

SparseMatrix assemble(Strategy s, const TrimConfiguration& config, const CoefficientField& c,
                      const CutCellQuadrature& cut, FormationOptions options) {
  return formWithTimings(s, config, c, cut, options).first;
}

SparseMatrix assembleGaussReference(const TrimConfiguration& config, const CoefficientField& c,
                                    const CutCellQuadrature& cut) {
  return assemble(Strategy::Reference, config, c, cut);
}

SparseMatrix assembleWQ(const TrimConfiguration& config, const CoefficientField& c, const CutCellQuadrature& cut) {
  return assemble(Strategy::WQ, config, c, cut);
}

SparseMatrix assembleHybrid(const TrimConfiguration& config, const CoefficientField& c,
                            const CutCellQuadrature& cut) {
  return assemble(Strategy::Hybrid, config, c, cut);
}

SparseMatrix assembleDWQ(const TrimConfiguration& config, const CoefficientField& c, const CutCellQuadrature& cut) {
  return assemble(Strategy::DWQ, config, c, cut);
}

}  // namespace trimquad
