#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hermbench/instances.hpp"
#include "hermbench/kahler.hpp"
#include "oracles.hpp"

using namespace hermbench;
constexpr double pi = std::numbers::pi;

TEST_CASE("flat torus has no negative Ricci: the KE recipe refuses") {
  auto g = GridGeometry::make_torus(1, 16, {2 * pi, 2 * pi});
  CHECK_THROWS_AS(kahler_einstein_solve(flat_torus_metric(g), SolverConfig{}),
                  RicciNotNegative);
}

TEST_CASE("exactly-Einstein input is a fixed point of the KE recipe") {
  auto g = GridGeometry::make_radial(RadialModel::HyperbolicDisk, 512, 2.0);
  KahlerEinsteinResult ke =
      kahler_einstein_solve(poincare_metric(g), SolverConfig{});
  CHECK(ke.report.converged);
  CHECK(sup_abs(ke.report.solution) <= 1e-8);
  const double unit = measured_curvature_unit(g);
  CHECK(ke.einstein_residual <= 5.0 * unit);
}

TEST_CASE("perturbed Poincare instance stabilizes under exhaustion") {
  const double spacing = 3.0 / 256;
  auto builder = [&](double rho) {
    const int res = static_cast<int>(std::lround(rho / spacing));
    auto g = GridGeometry::make_radial(RadialModel::HyperbolicDisk, res, rho);
    return perturbed_poincare_metric(g, 0.05, 2.0, 1.6);
  };
  KahlerEinsteinExhaustionResult ex = kahler_einstein_exhaustion(
      builder, {3.0, 4.5, 6.0}, 0.1, SolverConfig{}, 1e-5);
  REQUIRE(ex.exhaustion.stages.size() == 3);
  CHECK(ex.exhaustion.stabilized);
  CHECK(ex.exhaustion.inner_diffs.back() <
        ex.exhaustion.inner_diffs.front() + 1e-15);
  auto gfin = GridGeometry::make_radial(RadialModel::HyperbolicDisk,
                                        static_cast<int>(6.0 / spacing), 6.0);
  CHECK(ex.einstein_residual <= 5.0 * measured_curvature_unit(gfin));
}

TEST_CASE("prescribed Ricci: trivial and corrected torus instances") {
  auto g = GridGeometry::make_torus(1, 64, {2 * pi, 2 * pi});
  MetricField omega = flat_torus_metric(g);
  SolverConfig cfg;

  PrescribedRicciResult r0 = prescribed_ricci_solve(
      omega, ScalarField(g->num_nodes(), 0.0), {1e-1, 1e-2}, cfg);
  CHECK(sup_abs(r0.path.extrapolated) < 1e-10);
  CHECK(r0.ricci_identity_residual < 1e-10);

  ScalarField f = compatibility_corrected_cos(omega, 0.2);
  PrescribedRicciResult r =
      prescribed_ricci_solve(omega, f, {1e-1, 1e-2, 1e-3, 1e-4}, cfg);
  CHECK(r.ricci_identity_residual < 1e-6);
  CHECK(r.gauduchon.first == 0.0);  // n = 1, degree reasons
  CHECK(r.path.cauchy);
}

TEST_CASE("prescribed Ricci raises on a violated compatibility integral") {
  auto g = GridGeometry::make_torus(1, 32, {2 * pi, 2 * pi});
  MetricField omega = flat_torus_metric(g);
  ScalarField f(g->num_nodes());
  for (std::size_t m = 0; m < f.size(); ++m)
    f[m] = 0.1 * std::cos(g->coordinate(m, 0)) + 0.07;
  CHECK_THROWS_AS(prescribed_ricci_solve(omega, f, {1e-1, 1e-2}, SolverConfig{}),
                  CompatibilityViolated);
}

TEST_CASE("n = 2 product instance reduces to the one-factor solve") {
  auto g2 = GridGeometry::make_torus(2, 12, {2 * pi, 2 * pi, 2 * pi, 2 * pi});
  MetricField omega2 = flat_torus_metric(g2);
  ScalarField f2 = compatibility_corrected_cos(omega2, 0.15);  // depends on x^1
  PrescribedRicciResult r2 =
      prescribed_ricci_solve(omega2, f2, {1e-1, 1e-2, 1e-3}, SolverConfig{});
  CHECK(r2.ricci_identity_residual < 1e-5);
  CHECK(r2.gauduchon.first < 1e-7);
  CHECK(r2.gauduchon.second == 0.0);
}

TEST_CASE("flat metric is stationary under the flow") {
  auto g = GridGeometry::make_torus(1, 16, {2 * pi, 2 * pi});
  MetricField g0 = flat_torus_metric(g);
  FlowTrajectory traj = kahler_ricci_flow(g0, 0.01, 1e-3);
  CHECK(traj.times.front() == 0.0);
  // times[0] snapshot is bit-exact
  CHECK(traj.metrics.front().entry(0, 0, 0).real() ==
        g0.entry(0, 0, 0).real());
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    CHECK(traj.sup_rm[i] <= 1e-10);
    CHECK(std::abs(traj.metrics[i].entry(0, 0, 0).real() - 1.0) <= 1e-12);
  }
}

TEST_CASE("conformal flow matches the method-of-lines reference") {
  auto g = GridGeometry::make_torus(1, 32, {2 * pi, 2 * pi});
  ScalarField eta0(g->num_nodes());
  for (std::size_t m = 0; m < eta0.size(); ++m)
    eta0[m] = 0.2 * std::cos(g->coordinate(m, 0)) +
              0.1 * std::cos(g->coordinate(m, 1));
  MetricField g0(g, 1);
  for (std::size_t m = 0; m < eta0.size(); ++m)
    g0.entry(m, 0, 0) = std::exp(eta0[m]);
  FlowTrajectory traj = kahler_ricci_flow(g0, 0.05, 5e-5);
  ScalarField ref = oracles::mol_flow_reference(g, eta0, 0.05, 2.5e-4);
  double diff = 0.0;
  for (std::size_t m = 0; m < eta0.size(); ++m)
    diff = std::max(diff, std::abs(traj.metrics.back().entry(m, 0, 0).real() -
                                   std::exp(ref[m])));
  CHECK(diff < 1e-6);
  // smoothing: curvature decays along the heat-like flow
  CHECK(traj.sup_rm.back() < traj.sup_rm.front());
  // uniform equivalence constants stay finite and close to 1
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    CHECK(traj.equiv_min[i] > 0.5);
    CHECK(traj.equiv_max[i] < 2.0);
  }
}

TEST_CASE("volume-form law holds to first order in dt") {
  auto g = GridGeometry::make_torus(1, 16, {2 * pi, 2 * pi});
  MetricField g0 = conformal_torus_metric(g, 0.2);
  const double dt = 2e-4;
  FlowTrajectory traj = kahler_ricci_flow(g0, 10 * dt, dt);
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < traj.times.size(); ++k) {
    CurvaturePackage pkg = curvature_package(traj.metrics[k]);
    for (std::size_t m = 0; m < g0.nodes(); ++m) {
      const double lhs =
          (std::log(traj.metrics[k + 1].entry(m, 0, 0).real()) -
           std::log(traj.metrics[k].entry(m, 0, 0).real())) /
          dt;
      const double rhs = -4.0 * pkg.ricci.entry(m, 0, 0).real() /
                         traj.metrics[k].entry(m, 0, 0).real();
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  CHECK(worst <= 50.0 * dt);
}

TEST_CASE("flow step-size guard and positivity abort") {
  auto g = GridGeometry::make_torus(1, 32, {2 * pi, 2 * pi});
  MetricField g0 = conformal_torus_metric(g, 0.2);
  CHECK_THROWS_AS(kahler_ricci_flow(g0, 0.01, 10.0 * flow_stable_dt(g0)),
                  StepTooLarge);

  // positively curved Gaussian profile on the Euclidean disk: the metric
  // shrinks pointwise at rate 4 and degenerates in finite time
  auto gd = GridGeometry::make_radial(RadialModel::EuclideanDisk, 32, 2.0);
  MetricField well(gd, 1);
  for (std::size_t m = 0; m < well.nodes(); ++m)
    well.entry(m, 0, 0) =
        std::exp(-gd->radial_r()[m] * gd->radial_r()[m]);
  CHECK_THROWS_AS(kahler_ricci_flow(well, 0.01, flow_stable_dt(well)),
                  PositivityLost);
}

TEST_CASE("flow bound monitor: envelope, margins and negative control") {
  // flat: r = 0, kappa = 0, slope 0
  auto gt = GridGeometry::make_torus(1, 16, {2 * pi, 2 * pi});
  FlowTrajectory flat = kahler_ricci_flow(flat_torus_metric(gt), 0.01, 1e-3);
  FlowBoundReport fb = flow_bound_monitor(flat, 1.0, 1.0, 1.0, 0.0);
  CHECK(fb.ok);
  CHECK(fb.fitted_slope == doctest::Approx(0.0));

  // negatively curved radial model: r(0) = -1
  auto gr = GridGeometry::make_radial(RadialModel::HyperbolicDisk, 128, 2.0);
  MetricField p = poincare_metric(gr);
  FlowTrajectory traj = kahler_ricci_flow(p, 4.0 * flow_stable_dt(p),
                                          flow_stable_dt(p));
  const double kappa = -traj.max_ricci_eig.front();
  CHECK(kappa == doctest::Approx(1.0).epsilon(1e-6));
  const double k0 = 2.0 * traj.sup_rm.front() * traj.sup_rm.front() + 1.0;
  FlowBoundReport rep = flow_bound_monitor(traj, 10.0, 1.0, k0, kappa);
  CHECK(rep.ok);
  for (double m : rep.margins) CHECK(m >= -1e-9);

  FlowTrajectory bad = traj;
  for (double& r : bad.max_ricci_eig) r = -r;  // corrupted sign
  FlowBoundReport repb = flow_bound_monitor(bad, 10.0, 1.0, k0, kappa);
  CHECK_FALSE(repb.ok);
}

TEST_CASE("smooth-first pipeline flag composes flow and KE solve") {
  auto g = GridGeometry::make_radial(RadialModel::HyperbolicDisk, 256, 2.0);
  MetricField alpha = perturbed_poincare_metric(g, 0.03, 1.0, 0.8);
  FlowTrajectory smooth =
      kahler_ricci_flow(alpha, 4.0 * flow_stable_dt(alpha),
                        flow_stable_dt(alpha));
  KahlerEinsteinResult ke =
      kahler_einstein_solve(smooth.metrics.back(), SolverConfig{});
  CHECK(ke.report.converged);
}
