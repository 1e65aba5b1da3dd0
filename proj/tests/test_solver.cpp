#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hermbench/cutoff.hpp"
#include "hermbench/instances.hpp"
#include "hermbench/solver.hpp"
#include "oracles.hpp"

using namespace hermbench;
constexpr double pi = std::numbers::pi;

namespace {

GeometryPtr torus1(int res) {
  return GridGeometry::make_torus(1, res, {2 * pi, 2 * pi});
}

ProblemSpec flat_problem(const GeometryPtr& g, const ScalarField& h,
                         double eps) {
  MetricField omega = flat_torus_metric(g);
  return make_problem(omega, omega, h, eps,
                      make_operator(OperatorKind::LogMA, 1));
}

ScalarField zero_mean(ScalarField f) {
  double m = 0;
  for (double v : f) m += v;
  m /= static_cast<double>(f.size());
  for (double& v : f) v -= m;
  return f;
}

}  // namespace

TEST_CASE("exact root: chi = alpha, h = 0") {
  auto g = torus1(16);
  ProblemSpec p = flat_problem(g, ScalarField(g->num_nodes(), 0.0), 0.5);
  validate_problem(p);
  SolveReport rep = newton_solve(p, 1.0, ScalarField(g->num_nodes(), 0.0),
                                 SolverConfig{});
  CHECK(rep.converged);
  CHECK(rep.iterations <= 1);
  CHECK(sup_abs(rep.solution) == 0.0);
  CHECK(rep.eig_min == doctest::Approx(1.0));
  CHECK(rep.eig_max == doctest::Approx(1.0));
}

TEST_CASE("constant ansatz: eps = 1, h = c gives u = -c") {
  auto g = torus1(16);
  ProblemSpec p = flat_problem(g, ScalarField(g->num_nodes(), 0.7), 1.0);
  SolveReport rep = newton_solve(p, 1.0, ScalarField(g->num_nodes(), 0.0),
                                 SolverConfig{});
  CHECK(rep.converged);
  for (double v : rep.solution) CHECK(std::abs(v + 0.7) < 1e-12);
  CHECK(rep.c0_bound_ok);
}

TEST_CASE("torus MA with eps = 0 matches the Picard/Fourier oracle") {
  auto g = torus1(64);
  MetricField omega = flat_torus_metric(g);
  ScalarField f = compatibility_corrected_cos(omega, 0.2);
  ProblemSpec p = flat_problem(g, f, 0.0);
  SolveReport rep = newton_solve(p, 1.0, ScalarField(g->num_nodes(), 0.0),
                                 SolverConfig{});
  REQUIRE(rep.converged);
  ScalarField oracle = zero_mean(oracles::picard_ma_solve(g, f, 0.0));
  ScalarField mine = zero_mean(rep.solution);
  double diff = 0;
  for (std::size_t m = 0; m < mine.size(); ++m)
    diff = std::max(diff, std::abs(mine[m] - oracle[m]));
  CHECK(diff < 1e-8);
}

TEST_CASE("assembled linearization matches the residual map derivative") {
  auto g = torus1(32);
  MetricField omega = flat_torus_metric(g);
  ScalarField f = compatibility_corrected_cos(omega, 0.2);
  ProblemSpec p = flat_problem(g, f, 0.3);
  ScalarField u = random_trig_field(g, 0.05, 11);
  ScalarField v = random_trig_field(g, 1.0, 12);

  auto residual_at = [&](const ScalarField& w) {
    MetricField gg = p.chi;
    gg += p.disc->hessian(w);
    ScalarField r(w.size());
    for (std::size_t m = 0; m < w.size(); ++m)
      r[m] = std::log(gg.entry(m, 0, 0).real()) - f[m] - 0.3 * w[m];
    return r;
  };

  // coefficients at u
  MetricField gg = p.chi;
  gg += p.disc->hessian(u);
  MatrixField C(g, 1);
  for (std::size_t m = 0; m < u.size(); ++m)
    C.entry(m, 0, 0) = 1.0 / gg.entry(m, 0, 0).real();
  ScalarField Av = p.disc->apply_linearized(C, 0.3, v);

  const double t = 1e-6;
  ScalarField up(u.size()), um(u.size());
  for (std::size_t m = 0; m < u.size(); ++m) {
    up[m] = u[m] + t * v[m];
    um[m] = u[m] - t * v[m];
  }
  ScalarField rp = residual_at(up), rm = residual_at(um);
  double worst = 0.0, scale = 0.0;
  for (std::size_t m = 0; m < u.size(); ++m) {
    const double fd = (rp[m] - rm[m]) / (2 * t);
    worst = std::max(worst, std::abs(fd - Av[m]));
    scale = std::max(scale, std::abs(fd));
  }
  CHECK(worst <= 1e-6 * std::max(1.0, scale));
}

TEST_CASE("uniqueness probe: two feasible initializations agree") {
  auto g = torus1(32);
  MetricField omega = flat_torus_metric(g);
  ScalarField f = compatibility_corrected_cos(omega, 0.25);
  ProblemSpec p = flat_problem(g, f, 0.4);
  SolverConfig cfg;
  SolveReport a = newton_solve(p, 1.0, ScalarField(g->num_nodes(), 0.0), cfg);
  SolveReport b = newton_solve(p, 1.0, random_trig_field(g, 0.1, 3), cfg);
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  double diff = 0;
  for (std::size_t m = 0; m < a.solution.size(); ++m)
    diff = std::max(diff, std::abs(a.solution[m] - b.solution[m]));
  CHECK(diff < 1e-8);
}

TEST_CASE("cone exit on an infeasible initialization") {
  auto g = torus1(16);
  ProblemSpec p = flat_problem(g, ScalarField(g->num_nodes(), 0.0), 1.0);
  ScalarField bad(g->num_nodes());
  for (std::size_t m = 0; m < bad.size(); ++m)
    bad[m] = 10.0 * std::cos(g->coordinate(m, 0));
  CHECK_THROWS_AS(newton_solve(p, 1.0, bad, SolverConfig{}), ConeExit);
}

TEST_CASE("inner solver cap failure is reported") {
  auto g = torus1(64);
  MetricField omega = flat_torus_metric(g);
  ScalarField f = compatibility_corrected_cos(omega, 0.2);
  ProblemSpec p = flat_problem(g, f, 1e-4);
  SolverConfig cfg;
  cfg.linear = LinearSolverKind::KrylovJacobi;
  cfg.linear_cap_factor = 1;  // 64 iterations cannot reach 1e-12
  CHECK_THROWS_AS(newton_solve(p, 1.0, ScalarField(g->num_nodes(), 0.0), cfg),
                  LinearSolveFailure);
}

TEST_CASE("continuity path: trivial, consistent and stressed") {
  auto g = torus1(32);
  MetricField omega = flat_torus_metric(g);
  SolverConfig cfg;

  // h = 0: path constant at u = 0
  ProblemSpec p0 = flat_problem(g, ScalarField(g->num_nodes(), 0.0), 0.1);
  SolveReport r0 = continuity_path(p0, 8, cfg);
  CHECK(r0.converged);
  CHECK(sup_abs(r0.solution) < 1e-12);
  CHECK(r0.path_halvings == 0);

  // path independence against a direct solve at t = 1
  ScalarField h(g->num_nodes());
  for (std::size_t m = 0; m < h.size(); ++m)
    h[m] = 0.3 * std::cos(g->coordinate(m, 0));
  ProblemSpec p = flat_problem(g, h, 0.1);
  SolveReport path = continuity_path(p, 8, cfg);
  SolveReport direct =
      newton_solve(p, 1.0, ScalarField(g->num_nodes(), 0.0), cfg);
  REQUIRE(path.converged);
  REQUIRE(direct.converged);
  double diff = 0;
  for (std::size_t m = 0; m < h.size(); ++m)
    diff = std::max(diff, std::abs(path.solution[m] - direct.solution[m]));
  CHECK(diff < 1e-9);

  // stress instance: large forcing needs step halving but converges
  ScalarField hbig(g->num_nodes());
  for (std::size_t m = 0; m < hbig.size(); ++m)
    hbig[m] = 5.0 * std::cos(g->coordinate(m, 0));
  ProblemSpec pb = flat_problem(g, hbig, 0.1);
  SolverConfig tight = cfg;
  tight.max_iterations = 8;
  SolveReport rb = continuity_path(pb, 2, tight);
  CHECK(rb.converged);
  CHECK(rb.path_halvings > 0);
}

TEST_CASE("epsilon path: trivial and corrected instances") {
  auto g = torus1(64);
  MetricField omega = flat_torus_metric(g);
  SolverConfig cfg;

  ProblemSpec p0 = flat_problem(g, ScalarField(g->num_nodes(), 0.0), 1e-1);
  EpsilonPathResult r0 = epsilon_path(p0, {1e-1, 1e-2, 1e-3}, cfg);
  CHECK(r0.compatibility_ok);
  for (const auto& st : r0.stages) CHECK(sup_abs(st.solution) < 1e-12);
  CHECK(r0.extrapolated_valid);
  CHECK(sup_abs(r0.extrapolated) < 1e-11);

  ScalarField f = compatibility_corrected_cos(omega, 0.2);
  ProblemSpec p = flat_problem(g, f, 1e-1);
  EpsilonPathResult r = epsilon_path(p, {1e-1, 1e-2, 1e-3, 1e-4}, cfg);
  CHECK(r.compatibility_ok);
  CHECK(r.cauchy);
  CHECK(r.extrapolated_valid);
  CHECK(r.extrapolated_residual < 1e-6);
  ScalarField oracle = oracles::picard_ma_solve(g, f, 0.0);
  ScalarField a = zero_mean(r.extrapolated), b = zero_mean(oracle);
  double diff = 0;
  for (std::size_t m = 0; m < a.size(); ++m)
    diff = std::max(diff, std::abs(a[m] - b[m]));
  CHECK(diff < 1e-7);
  // each converged stage passes the C0 bound
  for (std::size_t k = 0; k < r.stages.size(); ++k) {
    ProblemSpec pk = p;
    pk.epsilon = r.epsilons[k];
    CHECK(c0_bound_check(pk, 1.0, r.stages[k]));
  }
}

TEST_CASE("epsilon path flags the incompatible constant mode") {
  auto g = torus1(32);
  MetricField omega = flat_torus_metric(g);
  // mean(e^f - 1) deliberately nonzero
  ScalarField f(g->num_nodes());
  for (std::size_t m = 0; m < f.size(); ++m)
    f[m] = 0.2 * std::cos(g->coordinate(m, 0)) + 0.05;
  ProblemSpec p = flat_problem(g, f, 1e-1);
  EpsilonPathResult r = epsilon_path(p, {1e-1, 1e-2, 1e-3}, SolverConfig{});
  CHECK(r.compatibility_applicable);
  CHECK_FALSE(r.compatibility_ok);
  CHECK_FALSE(r.extrapolated_valid);  // extrapolation withheld
  // sup norms scale like |mean|/eps (Theorem-style bound, factor-2 slack)
  for (std::size_t k = 0; k < r.stages.size(); ++k) {
    const double bound = c0_bound_value(p, 1.0) / r.epsilons[k] + 1e-9;
    CHECK(sup_abs(r.stages[k].solution) <= bound);
  }
  const double m01 = sup_abs(r.stages[0].solution);
  const double m001 = sup_abs(r.stages[2].solution);
  CHECK(m001 > 10.0 * m01);  // constant mode growth ~ 1/eps
}

TEST_CASE("c0 bound check accepts valid reports and rejects corrupted ones") {
  auto g = torus1(32);
  ProblemSpec p = flat_problem(g, ScalarField(g->num_nodes(), 0.5), 1.0);
  SolveReport rep = newton_solve(p, 1.0, ScalarField(g->num_nodes(), 0.0),
                                 SolverConfig{});
  REQUIRE(rep.converged);
  CHECK(c0_bound_check(p, 1.0, rep));
  SolveReport bad = rep;
  for (double& v : bad.solution) v *= 10.0;
  CHECK_FALSE(c0_bound_check(p, 1.0, bad));
  CHECK_THROWS_AS(c0_bound_check(flat_problem(g, p.h, 0.0), 1.0, rep),
                  std::invalid_argument);
}

TEST_CASE("exhaustion: trivial data stays zero; parameters validated") {
  const double spacing = 2.0 / 128;
  auto builder = [&](double rho) {
    const int res = static_cast<int>(std::lround(rho / spacing));
    auto g = GridGeometry::make_radial(RadialModel::HyperbolicDisk, res, rho);
    MetricField alpha = poincare_metric(g);
    return make_problem(alpha, alpha, ScalarField(g->num_nodes(), 0.0), 1.0,
                        make_operator(OperatorKind::LogMA, 1));
  };
  ExhaustionResult r =
      exhaustion_solve(builder, {2.0, 3.0}, 0.1, SolverConfig{}, 1e-8);
  CHECK(r.stabilized);
  for (const auto& st : r.stages) CHECK(sup_abs(st.solution) < 1e-12);
  CHECK(r.inner_diffs.back() < 1e-12);

  CHECK_THROWS_AS(exhaustion_solve(builder, {2.0, 3.0}, 0.2, SolverConfig{},
                                   1e-8),
                  std::invalid_argument);
  CHECK_THROWS_AS(exhaustion_solve(builder, {3.0, 2.0}, 0.1, SolverConfig{},
                                   1e-8),
                  std::invalid_argument);
}

TEST_CASE("radial solve with truncated data and eps = 1") {
  auto g = GridGeometry::make_radial(RadialModel::HyperbolicDisk, 256, 3.0);
  MetricField alpha = conformal_truncation(poincare_metric(g), 3.0, 0.1);
  ScalarField h(g->num_nodes());
  for (std::size_t m = 0; m < h.size(); ++m)
    h[m] = 0.1 * std::cos(pi * g->radial_s()[m] / 3.0);
  ProblemSpec p = make_problem(alpha, alpha, h, 1.0,
                               make_operator(OperatorKind::LogMA, 1));
  SolveReport rep = newton_solve(p, 1.0, ScalarField(g->num_nodes(), 0.0),
                                 SolverConfig{});
  CHECK(rep.converged);
  CHECK(rep.eig_min > 0.0);
  CHECK(rep.c0_bound_ok);
}

TEST_CASE("problem validation catches cone violations") {
  auto g = torus1(16);
  MetricField omega = flat_torus_metric(g);
  Form11Field chi = omega;
  chi.entry(5, 0, 0) = -1.0;
  ProblemSpec p = make_problem(omega, chi, ScalarField(g->num_nodes(), 0.0),
                               1.0, make_operator(OperatorKind::LogMA, 1));
  CHECK_THROWS_AS(validate_problem(p), std::invalid_argument);
}

TEST_CASE("n = 2 solve with both operators") {
  auto g = GridGeometry::make_torus(2, 10, {2 * pi, 2 * pi, 2 * pi, 2 * pi});
  MetricField omega = flat_torus_metric(g);
  ScalarField h(g->num_nodes());
  for (std::size_t m = 0; m < h.size(); ++m)
    h[m] = 0.2 * std::cos(g->coordinate(m, 0)) +
           0.1 * std::cos(g->coordinate(m, 2));
  for (OperatorKind kind : {OperatorKind::LogMA, OperatorKind::NMinus1MA}) {
    ProblemSpec p = make_problem(omega, omega, h, 0.5,
                                 make_operator(kind, 2));
    SolveReport rep = newton_solve(p, 1.0, ScalarField(g->num_nodes(), 0.0),
                                   SolverConfig{});
    CHECK(rep.converged);
    CHECK(rep.c0_bound_ok);
    CHECK(rep.eig_min > 0.0);
  }
}
