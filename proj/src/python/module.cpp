#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hermbench/config.hpp"
#include "hermbench/cutoff.hpp"
#include "hermbench/instances.hpp"
#include "hermbench/kahler.hpp"
#include "hermbench/pipeline.hpp"
#include "hermbench/serialize.hpp"

namespace py = pybind11;
using namespace hermbench;

namespace {

py::array_t<cplx> field_to_numpy(const MatrixField& f) {
  const auto n = static_cast<py::ssize_t>(f.n());
  py::array_t<cplx> out({static_cast<py::ssize_t>(f.nodes()), n, n});
  auto r = out.mutable_unchecked<3>();
  for (py::ssize_t m = 0; m < r.shape(0); ++m)
    for (py::ssize_t i = 0; i < n; ++i)
      for (py::ssize_t j = 0; j < n; ++j)
        r(m, i, j) = f.entry(static_cast<std::size_t>(m), static_cast<int>(i),
                             static_cast<int>(j));
  return out;
}

MatrixField numpy_to_field(const GeometryPtr& geom, py::array_t<cplx> a) {
  auto r = a.unchecked<3>();
  if (static_cast<std::size_t>(r.shape(0)) != geom->num_nodes())
    throw std::invalid_argument("field array: wrong node count");
  MatrixField f(geom, static_cast<int>(r.shape(1)));
  for (py::ssize_t m = 0; m < r.shape(0); ++m)
    for (py::ssize_t i = 0; i < r.shape(1); ++i)
      for (py::ssize_t j = 0; j < r.shape(2); ++j)
        f.entry(static_cast<std::size_t>(m), static_cast<int>(i),
                static_cast<int>(j)) = r(m, i, j);
  return f;
}

ScalarField numpy_to_scalar(py::array_t<double> a) {
  auto r = a.unchecked<1>();
  ScalarField f(static_cast<std::size_t>(r.shape(0)));
  for (py::ssize_t i = 0; i < r.shape(0); ++i)
    f[static_cast<std::size_t>(i)] = r(i);
  return f;
}

py::array_t<double> scalar_to_numpy(const ScalarField& f) {
  py::array_t<double> out(static_cast<py::ssize_t>(f.size()));
  auto r = out.mutable_unchecked<1>();
  for (py::ssize_t i = 0; i < r.shape(0); ++i)
    r(i) = f[static_cast<std::size_t>(i)];
  return out;
}

py::dict report_to_dict(const SolveReport& rep) {
  py::dict d;
  d["solution"] = scalar_to_numpy(rep.solution);
  d["residual_sup"] = rep.residual_sup;
  d["iterations"] = rep.iterations;
  d["converged"] = rep.converged;
  d["eig_min"] = rep.eig_min;
  d["eig_max"] = rep.eig_max;
  d["c0_bound_ok"] = rep.c0_bound_ok;
  return d;
}

SolverConfig config_from_kwargs(double tol, int max_iterations) {
  SolverConfig cfg;
  cfg.tol = tol;
  cfg.max_iterations = max_iterations;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "hermbench: canonical-metric solves on model geometries";
  m.attr("__version__") = HERMBENCH_VERSION;

  py::enum_<RadialModel>(m, "RadialModel")
      .value("EuclideanDisk", RadialModel::EuclideanDisk)
      .value("HyperbolicDisk", RadialModel::HyperbolicDisk);

  py::class_<GridGeometry, GeometryPtr>(m, "GridGeometry")
      .def_static("make_torus", &GridGeometry::make_torus, py::arg("n_complex"),
                  py::arg("resolution"), py::arg("periods"))
      .def_static("make_radial", &GridGeometry::make_radial, py::arg("model"),
                  py::arg("resolution"), py::arg("truncation_radius"))
      .def_property_readonly("num_nodes", &GridGeometry::num_nodes)
      .def_property_readonly("n_complex", &GridGeometry::n_complex)
      .def_property_readonly("resolution", &GridGeometry::resolution)
      .def("coordinate", &GridGeometry::coordinate)
      .def_property_readonly("radial_s", [](const GridGeometry& g) {
        return scalar_to_numpy(g.radial_s());
      });

  m.def("flat_torus_metric",
        [](const GeometryPtr& g) { return field_to_numpy(flat_torus_metric(g)); });
  m.def("poincare_metric", [](const GeometryPtr& g) {
    return field_to_numpy(poincare_metric(g));
  });

  m.def(
      "complex_hessian",
      [](const GeometryPtr& g, py::array_t<double> u) {
        return field_to_numpy(complex_hessian(g, numpy_to_scalar(u)));
      },
      py::arg("geometry"), py::arg("u"));

  m.def(
      "curvature_package",
      [](const GeometryPtr& g, py::array_t<cplx> metric) {
        CurvaturePackage pkg = curvature_package(numpy_to_field(g, metric));
        py::dict d;
        d["ricci"] = field_to_numpy(pkg.ricci);
        d["ricci_trace"] = field_to_numpy(pkg.ricci_trace);
        d["sup_torsion"] = pkg.sup_torsion;
        d["sup_nabla_torsion"] = pkg.sup_nabla_torsion;
        d["sup_curvature"] = pkg.sup_curvature;
        d["sup_ricci"] = pkg.sup_ricci;
        return d;
      },
      py::arg("geometry"), py::arg("metric"));

  m.def(
      "gauduchon_residuals",
      [](const GeometryPtr& g, py::array_t<cplx> metric) {
        return gauduchon_residuals(numpy_to_field(g, metric));
      },
      py::arg("geometry"), py::arg("metric"));

  m.def(
      "einstein_residual",
      [](const GeometryPtr& g, py::array_t<cplx> metric, double lam) {
        return einstein_residual(numpy_to_field(g, metric), lam);
      },
      py::arg("geometry"), py::arg("metric"), py::arg("lam"));

  py::class_<CutoffFunction>(m, "CutoffFunction")
      .def(py::init<double>(), py::arg("kappa"))
      .def("value", &CutoffFunction::value)
      .def("derivative", &CutoffFunction::derivative)
      .def_property_readonly("plateau_end", &CutoffFunction::plateau_end);

  m.def(
      "conformal_truncation",
      [](const GeometryPtr& g, py::array_t<cplx> metric, double rho0,
         double kappa) {
        return field_to_numpy(
            conformal_truncation(numpy_to_field(g, metric), rho0, kappa));
      },
      py::arg("geometry"), py::arg("metric"), py::arg("rho0"),
      py::arg("kappa"));

  py::enum_<OperatorKind>(m, "OperatorKind")
      .value("LogMA", OperatorKind::LogMA)
      .value("NMinus1MA", OperatorKind::NMinus1MA);

  m.def(
      "eval_f_grad",
      [](OperatorKind kind, const Eigen::VectorXd& lambda) {
        SymbolEval e =
            eval_f_grad(make_operator(kind, static_cast<int>(lambda.size())),
                        lambda);
        py::dict d;
        d["in_cone"] = e.in_cone;
        d["evaluable"] = e.evaluable;
        d["value"] = e.value;
        d["gradient"] = e.evaluable ? py::cast(e.gradient) : py::none();
        return d;
      },
      py::arg("kind"), py::arg("lam"));

  m.def(
      "operator_linearization",
      [](OperatorKind kind, const Eigen::MatrixXcd& alpha,
         const Eigen::MatrixXcd& g) {
        OperatorLinearization lin = operator_linearization(
            make_operator(kind, static_cast<int>(alpha.rows())), alpha, g);
        py::dict d;
        d["value"] = lin.value;
        d["coefficients"] = lin.coefficients;
        d["lam"] = lin.lambda;
        return d;
      },
      py::arg("kind"), py::arg("alpha"), py::arg("g"));

  m.def(
      "concavity_monotonicity_probe",
      [](OperatorKind kind, int dimension, int trials, std::uint64_t seed) {
        ProbeReport rep = concavity_monotonicity_probe(
            make_operator(kind, dimension), trials, seed);
        py::dict d;
        d["trials"] = rep.trials;
        d["concavity_violations"] = rep.concavity_violations;
        d["monotonicity_violations"] = rep.monotonicity_violations;
        d["symmetry_violations"] = rep.symmetry_violations;
        d["gradient_violations"] = rep.gradient_violations;
        d["max_gradient_fd_error"] = rep.max_gradient_fd_error;
        d["ok"] = rep.ok();
        return d;
      },
      py::arg("kind"), py::arg("dimension"), py::arg("trials"),
      py::arg("seed"));

  m.def(
      "newton_solve",
      [](const GeometryPtr& geom, py::array_t<cplx> alpha,
         py::array_t<cplx> chi, py::array_t<double> h, double epsilon,
         OperatorKind kind, double t, double tol, int max_iterations) {
        ProblemSpec p = make_problem(
            numpy_to_field(geom, alpha), numpy_to_field(geom, chi),
            numpy_to_scalar(h), epsilon,
            make_operator(kind, geom->n_complex()));
        SolveReport rep =
            newton_solve(p, t, ScalarField(geom->num_nodes(), 0.0),
                         config_from_kwargs(tol, max_iterations));
        return report_to_dict(rep);
      },
      py::arg("geometry"), py::arg("alpha"), py::arg("chi"), py::arg("h"),
      py::arg("epsilon"), py::arg("kind") = OperatorKind::LogMA,
      py::arg("t") = 1.0, py::arg("tol") = 1e-10,
      py::arg("max_iterations") = 50);

  m.def(
      "epsilon_path",
      [](const GeometryPtr& geom, py::array_t<cplx> alpha,
         py::array_t<cplx> chi, py::array_t<double> h,
         const std::vector<double>& epsilons, OperatorKind kind, double tol) {
        ProblemSpec p = make_problem(
            numpy_to_field(geom, alpha), numpy_to_field(geom, chi),
            numpy_to_scalar(h), epsilons.front(),
            make_operator(kind, geom->n_complex()));
        EpsilonPathResult r =
            epsilon_path(p, epsilons, config_from_kwargs(tol, 50));
        py::dict d;
        d["cauchy_diffs"] = r.cauchy_diffs;
        d["cauchy"] = r.cauchy;
        d["compatibility_ok"] = r.compatibility_ok;
        d["compatibility_integral"] = r.compatibility_integral;
        d["extrapolated_valid"] = r.extrapolated_valid;
        if (r.extrapolated_valid) {
          d["extrapolated"] = scalar_to_numpy(r.extrapolated);
          d["extrapolated_residual"] = r.extrapolated_residual;
        }
        py::list stages;
        for (const auto& st : r.stages) stages.append(report_to_dict(st));
        d["stages"] = stages;
        return d;
      },
      py::arg("geometry"), py::arg("alpha"), py::arg("chi"), py::arg("h"),
      py::arg("epsilons"), py::arg("kind") = OperatorKind::LogMA,
      py::arg("tol") = 1e-10);

  m.def(
      "kahler_einstein_solve",
      [](const GeometryPtr& geom, py::array_t<cplx> alpha, double tol,
         double kappa) {
        KahlerEinsteinResult r = kahler_einstein_solve(
            numpy_to_field(geom, alpha), config_from_kwargs(tol, 50), kappa);
        py::dict d;
        d["metric"] = field_to_numpy(r.metric);
        d["report"] = report_to_dict(r.report);
        d["einstein_residual"] = r.einstein_residual;
        return d;
      },
      py::arg("geometry"), py::arg("alpha"), py::arg("tol") = 1e-10,
      py::arg("kappa") = 0.1);

  m.def(
      "prescribed_ricci_solve",
      [](const GeometryPtr& geom, py::array_t<cplx> omega,
         py::array_t<double> f, const std::vector<double>& deltas,
         double tol) {
        PrescribedRicciResult r =
            prescribed_ricci_solve(numpy_to_field(geom, omega),
                                   numpy_to_scalar(f), deltas,
                                   config_from_kwargs(tol, 50));
        py::dict d;
        d["metric"] = field_to_numpy(r.metric);
        d["ricci_identity_residual"] = r.ricci_identity_residual;
        d["gauduchon"] = r.gauduchon;
        return d;
      },
      py::arg("geometry"), py::arg("omega"), py::arg("f"), py::arg("deltas"),
      py::arg("tol") = 1e-10);

  m.def(
      "kahler_ricci_flow",
      [](const GeometryPtr& geom, py::array_t<cplx> g0, double t_final,
         double dt) {
        FlowTrajectory traj =
            kahler_ricci_flow(numpy_to_field(geom, g0), t_final, dt);
        py::dict d;
        d["times"] = traj.times;
        d["sup_rm"] = traj.sup_rm;
        d["max_ricci_eig"] = traj.max_ricci_eig;
        d["min_metric_eig"] = traj.min_metric_eig;
        d["final_metric"] = field_to_numpy(traj.metrics.back());
        return d;
      },
      py::arg("geometry"), py::arg("g0"), py::arg("t_final"), py::arg("dt"));
  m.def("flow_stable_dt", [](const GeometryPtr& geom, py::array_t<cplx> g0) {
    return flow_stable_dt(numpy_to_field(geom, g0));
  });

  py::class_<HessianGeometry, HessianGeometryPtr>(m, "HessianGeometry")
      .def_static(
          "make_torus",
          [](int n_real, int resolution, const std::vector<double>& periods,
             const Eigen::MatrixXd& quadratic, py::array_t<double> phi) {
            return HessianGeometry::make_torus(n_real, resolution, periods,
                                               quadratic, numpy_to_scalar(phi));
          })
      .def_static("make_log_orthant_model",
                  &HessianGeometry::make_log_orthant_model)
      .def_property_readonly("num_nodes", &HessianGeometry::num_nodes)
      .def_property_readonly("n_real", &HessianGeometry::n_real)
      .def("metric",
           [](const HessianGeometry& hg) {
             py::array_t<double> out({static_cast<py::ssize_t>(hg.num_nodes()),
                                      static_cast<py::ssize_t>(hg.n_real()),
                                      static_cast<py::ssize_t>(hg.n_real())});
             auto r = out.mutable_unchecked<3>();
             for (py::ssize_t n = 0; n < r.shape(0); ++n)
               for (py::ssize_t i = 0; i < r.shape(1); ++i)
                 for (py::ssize_t j = 0; j < r.shape(2); ++j)
                   r(n, i, j) = hg.metric().at(static_cast<std::size_t>(n))(
                       static_cast<int>(i), static_cast<int>(j));
             return out;
           });

  m.def("tangent_lift", [](const HessianGeometryPtr& hg) {
    MetricField lift = tangent_lift(hg);
    return py::make_tuple(lift.geometry(), field_to_numpy(lift));
  });
  m.def("lift_correspondence_check", [](const HessianGeometryPtr& hg) {
    LiftResiduals lr = lift_correspondence_check(hg);
    py::dict d;
    d["curvature"] = lr.curvature;
    d["ricci"] = lr.ricci;
    d["torsion"] = lr.torsion;
    return d;
  });
  m.def(
      "hesse_einstein_solve",
      [](const HessianGeometryPtr& hg, double tol, double kappa) {
        HesseEinsteinResult r =
            hesse_einstein_solve(hg, config_from_kwargs(tol, 50), kappa);
        py::dict d;
        d["residual"] = r.residual;
        d["report"] = report_to_dict(r.report);
        return d;
      },
      py::arg("hg"), py::arg("tol") = 1e-10, py::arg("kappa") = 0.1);

  m.def(
      "run_pipeline",
      [](const std::string& config_json) {
        RunConfig cfg = parse_config_or_throw(config_json);
        RunManifest man = run_pipeline(cfg);
        py::dict d;
        d["scenario"] = man.scenario;
        d["all_passed"] = man.all_passed();
        d["curvature_unit"] = man.curvature_unit;
        py::list checks;
        for (const auto& c : man.checks) {
          py::dict row;
          row["name"] = c.name;
          row["value"] = c.value;
          row["tolerance"] = c.tolerance;
          row["oracle"] = c.oracle;
          row["pass"] = c.pass;
          checks.append(row);
        }
        d["checks"] = checks;
        return d;
      },
      py::arg("config_json"));

  m.def("geometry_to_json",
        [](const GeometryPtr& g) { return geometry_to_json(*g); });
  m.def("geometry_from_json", &geometry_from_json);

  // exception translation for the named error conditions
  py::register_exception<RicciNotNegative>(m, "RicciNotNegative");
  py::register_exception<CompatibilityViolated>(m, "CompatibilityViolated");
  py::register_exception<PositivityLost>(m, "PositivityLost");
  py::register_exception<StepTooLarge>(m, "StepTooLarge");
  py::register_exception<KappaNotPositive>(m, "KappaNotPositive");
  py::register_exception<LineSearchStalled>(m, "LineSearchStalled");
  py::register_exception<ConeExit>(m, "ConeExit");
  py::register_exception<PathStalled>(m, "PathStalled");
  py::register_exception<LinearSolveFailure>(m, "LinearSolveFailure");
  py::register_exception<OutOfConeError>(m, "OutOfConeError");
}
