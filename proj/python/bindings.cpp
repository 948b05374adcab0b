#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "trimquad/errors.hpp"
#include "trimquad/experiments.hpp"
#include "trimquad/gauss.hpp"

namespace py = pybind11;
using namespace trimquad;

namespace {

py::array_t<double> toArray(std::span<const double> v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());  // copies
}

py::array_t<double> dense(const Eigen::SparseMatrix<double, Eigen::RowMajor>& S) {
  py::array_t<double> a({static_cast<py::ssize_t>(S.rows()), static_cast<py::ssize_t>(S.cols())});
  auto m = a.mutable_unchecked<2>();
  for (py::ssize_t i = 0; i < S.rows(); ++i) {
    for (py::ssize_t j = 0; j < S.cols(); ++j) m(i, j) = 0.0;
  }
  for (int k = 0; k < S.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(S, k); it; ++it) m(it.row(), it.col()) = it.value();
  }
  return a;
}

TensorBasis2D square(int p, int n) {
  return TensorBasis2D(Basis1D(KnotVector::uniform(p, n)), Basis1D(KnotVector::uniform(p, n)));
}

TrimConfiguration configure(const TrimmedDomain& domain, int p, int n) {
  return classifyElements(square(p, n), domain);
}

py::list weightRows(std::span<const WeightRow> rows) {
  py::list out;
  for (const WeightRow& r : rows) out.append(py::make_tuple(r.firstPoint, toArray(r.weights)));
  return out;
}

py::dict reportDict(const FormationReport& r) {
  py::dict d;
  d["strategy"] = strategyName(r.strategy);
  d["t_weights"] = r.tWeights;
  d["t_interior"] = r.tInterior;
  d["t_cutRegular"] = r.tCutRegular;
  d["t_cutElements"] = r.tCutElements;
  d["t_total"] = r.tTotal;
  d["dwq_rows"] = r.dwqRows;
  d["fallback_rows"] = r.fallbackRows;
  return d;
}

}  // namespace

PYBIND11_MODULE(_trimquad, m) {
  m.doc() = "Mass matrices and L2 projection on trimmed B-spline spaces";

  py::register_exception<ConstructionError>(m, "ConstructionError", PyExc_RuntimeError);
  py::register_exception<ConfigurationError>(m, "ConfigurationError", PyExc_RuntimeError);
  py::register_exception<NotSpdError>(m, "NotSpdError", PyExc_RuntimeError);

  py::class_<Basis1D>(m, "Basis1D")
      .def(py::init([](int degree, std::vector<double> knots) { return Basis1D(KnotVector(degree, std::move(knots))); }),
           py::arg("degree"), py::arg("knots"))
      .def_static("uniform", [](int p, int n) { return Basis1D(KnotVector::uniform(p, n)); }, py::arg("degree"),
                  py::arg("elements"))
      .def_property_readonly("degree", &Basis1D::degree)
      .def_property_readonly("knots", [](const Basis1D& b) { return toArray(b.knotVector().knots()); })
      .def("__len__", &Basis1D::size)
      .def("find_span", &Basis1D::findSpan, py::arg("u"))
      .def("eval", &Basis1D::eval, py::arg("i"), py::arg("u"))
      .def(
          "eval_nonzero",
          [](const Basis1D& b, double u) {
            const NonzeroValues nz = b.evalNonzero(u);
            return py::make_tuple(nz.first, toArray(std::span<const double>(nz.values.data(), b.degree() + 1)));
          },
          py::arg("u"), "(first index, the p+1 non-zero values) at u")
      .def("support", [](const Basis1D& b, int i) { return py::make_tuple(b.supportBegin(i), b.supportEnd(i)); });

  m.def(
      "insert_knot",
      [](const Basis1D& b, double u) {
        auto [fine, S] = insertKnot(b, u);
        return py::make_tuple(fine, dense(S.entries));
      },
      py::arg("basis"), py::arg("u"), "(refined basis, S) with refined coefficients = S @ coarse");
  m.def(
      "subdivision_matrix",
      [](const Basis1D& b, std::vector<double> target) {
        const SubdivisionMatrix S = subdivisionMatrixTo(b, target);
        return py::make_tuple(S.target, dense(S.entries));
      },
      py::arg("basis"), py::arg("target_knots"));
  m.def(
      "make_discontinuous",
      [](const Basis1D& b, double u) {
        const SubdivisionMatrix S = makeDiscontinuous(b, u);
        return py::make_tuple(S.target, dense(S.entries));
      },
      py::arg("basis"), py::arg("u"));

  m.def(
      "gauss_legendre",
      [](int n) {
        const GaussRule g = gaussLegendre(n);
        return py::make_tuple(toArray(g.points), toArray(g.weights));
      },
      py::arg("n"), "points and weights on [-1, 1]");

  m.def(
      "wq_rules",
      [](const Basis1D& b) {
        const WeightedRuleSet r = buildWQRules(b);
        py::dict d;
        d["points"] = toArray(r.layout.points);
        d["rows"] = weightRows(r.rows);
        d["max_residual"] = r.maxRelativeResidual;
        return d;
      },
      py::arg("basis"), "weighted quadrature: points and one (first point, weights) row per test function");
  m.def(
      "dwq_rules",
      [](const Basis1D& b, double disc) {
        const DiscontinuousRuleSet r = buildDWQ(b, placeWQPoints(b), disc);
        py::dict d;
        d["points"] = toArray(r.layout.points);
        d["split"] = r.splitPoint;
        d["rows"] = weightRows(r.rows);
        d["max_residual"] = r.maxRelativeResidual;
        return d;
      },
      py::arg("basis"), py::arg("disc"), "one-sided weighted quadrature; points [0, split) lie below disc");

  py::class_<TrimmedDomain>(m, "TrimmedDomain")
      .def_property_readonly("name", &TrimmedDomain::name)
      .def("inside", [](const TrimmedDomain& d, double x, double y) { return d.inside({x, y}); });
  m.def("case", &caseByName, py::arg("name"), "none, line, circle or corner");
  m.def("line_case", &lineCase, py::arg("level") = 0.37);
  m.def("circle_case", &circleCase, py::arg("radius") = 0.8);
  m.def("corner_case", &cornerCase);

  m.def(
      "classify",
      [](const TrimmedDomain& domain, int p, int n) {
        const TrimConfiguration cfg = configure(domain, p, n);
        py::dict d;
        for (Location l : {Location::Interior, Location::Cut, Location::Exterior}) {
          py::dict c;
          c["elements"] = cfg.countElements(l);
          c["functions"] = cfg.countFunctions(l);
          d[locationName(l)] = c;
        }
        return d;
      },
      py::arg("domain"), py::arg("degree"), py::arg("elements"));

  m.def(
      "cut_quadrature",
      [](const TrimmedDomain& domain, int p, int n, std::optional<int> q, int points) {
        const TrimConfiguration cfg = configure(domain, p, n);
        const CutCellQuadrature cut = cutCellQuadrature(cfg, q.value_or(std::min(p, kMaxCutDegree)), false, points);
        py::array_t<double> xy({static_cast<py::ssize_t>(cut.numPoints()), py::ssize_t{2}});
        py::array_t<double> w(std::vector<py::ssize_t>{static_cast<py::ssize_t>(cut.numPoints())});
        auto X = xy.mutable_unchecked<2>();
        py::ssize_t k = 0;
        for (const CutElementRule& r : cut.rules) {
          for (std::size_t j = 0; j < r.points.size(); ++j, ++k) {
            X(k, 0) = r.points[j].x;
            X(k, 1) = r.points[j].y;
            w.mutable_data()[k] = r.weights[j];
          }
        }
        return py::make_tuple(xy, w);
      },
      py::arg("domain"), py::arg("degree"), py::arg("elements"), py::arg("q") = py::none(), py::arg("points") = 0,
      "points (N x 2) and weights of the cut elements");

  m.def(
      "mass_matrix",
      [](const TrimmedDomain& domain, int p, int n, const std::string& strategy) {
        const TrimConfiguration cfg = configure(domain, p, n);
        const CutCellQuadrature cut = massCutQuadrature(cfg);
        auto [M, report] = formWithTimings(strategyFromName(strategy), cfg, {}, cut);
        py::dict d;
        d["indptr"] = py::array_t<int>(static_cast<py::ssize_t>(M.rowStart.size()), M.rowStart.data());
        d["indices"] = py::array_t<int>(static_cast<py::ssize_t>(M.columns.size()), M.columns.data());
        d["data"] = toArray(M.values);
        d["functions"] = py::array_t<int>(static_cast<py::ssize_t>(M.functions.size()), M.functions.data());
        d["report"] = reportDict(report);
        return d;
      },
      py::arg("domain"), py::arg("degree"), py::arg("elements"), py::arg("strategy") = "hybrid",
      "CSR arrays over the retained functions (flat tensor indices in 'functions')");

  m.def(
      "project",
      [](const TrimmedDomain& domain, int p, int n, const std::string& strategy,
         std::optional<std::function<double(double, double)>> f) {
        const TrimConfiguration cfg = configure(domain, p, n);
        ProjectionProblem problem{cfg};
        problem.strategy = strategyFromName(strategy);
        if (f) problem.f = *f;
        const ProjectionResult r = project(problem);
        py::dict d;
        d["l2"] = r.l2;
        d["dofs"] = r.mass.size();
        d["coefficients"] = toArray(std::span<const double>(r.solve.x.data(), static_cast<std::size_t>(r.solve.x.size())));
        d["relative_residual"] = r.solve.relativeResidual;
        d["condition"] = r.solve.conditionEstimate;
        d["warning"] = r.solve.warning;
        return d;
      },
      py::arg("domain"), py::arg("degree"), py::arg("elements"), py::arg("strategy") = "hybrid",
      py::arg("f") = py::none(), "L2 projection of f (default sin(2x) cos(3y))");

  m.def(
      "convergence_study",
      [](const TrimmedDomain& domain, const std::string& strategy, std::vector<int> degrees, std::vector<int> meshes) {
        const auto records = runConvergenceStudy(domain, strategyFromName(strategy), degrees, meshes);
        py::list out;
        for (const ConvergenceRecord& r : records) {
          py::dict d;
          d["case"] = r.caseName;
          d["strategy"] = strategyName(r.strategy);
          d["p"] = r.degree;
          d["h"] = r.h;
          d["dofs"] = r.dofs;
          d["l2_rel"] = r.l2;
          d["rate"] = r.rate;
          d["condition"] = r.condition;
          out.append(d);
        }
        return py::make_tuple(out, convergenceCsv(records));
      },
      py::arg("domain"), py::arg("strategy"), py::arg("degrees"), py::arg("meshes"), "(records, CSV text)");

  m.def(
      "mass_table",
      [](const TrimmedDomain& domain, std::vector<int> degrees, int elements) {
        const auto rows = massMatrixTable(domain, degrees, elements);
        py::list out;
        for (const MassTableRow& r : rows) {
          py::dict d;
          d["p"] = r.degree;
          d["ref_norm"] = r.referenceNorm;
          for (int k = 0; k < 3; ++k) {
            const std::string s = strategyName(kFastStrategies[k]);
            d[py::str(s + "_abs")] = r.absolute[k];
            d[py::str(s + "_rel")] = r.relative[k];
          }
          out.append(d);
        }
        return py::make_tuple(out, massTableCsv(rows));
      },
      py::arg("domain"), py::arg("degrees"), py::arg("elements") = 10, "(rows, CSV text)");

  m.def(
      "time_formation",
      [](const TrimmedDomain& domain, const std::string& strategy, int p, int n, int repetitions) {
        return reportDict(timeFormation(domain, strategyFromName(strategy), p, n, repetitions).report);
      },
      py::arg("domain"), py::arg("strategy"), py::arg("degree"), py::arg("elements"), py::arg("repetitions") = 5,
      "median component times in seconds");
}
