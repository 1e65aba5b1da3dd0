#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hermbench/eigen_ops.hpp"
#include "hermbench/instances.hpp"

using namespace hermbench;
constexpr double pi = std::numbers::pi;

namespace {
Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) out[i++] = x;
  return out;
}
}  // namespace

TEST_CASE("log-MA values and gradients in closed form") {
  EigenOperator op = make_operator(OperatorKind::LogMA, 2);
  SymbolEval e = eval_f_grad(op, vec({1.0, 1.0}));
  CHECK(e.in_cone);
  CHECK(e.value == doctest::Approx(0.0));
  CHECK(e.gradient[0] == doctest::Approx(1.0));
  CHECK(e.gradient[1] == doctest::Approx(1.0));

  e = eval_f_grad(op, vec({2.0, 0.5}));
  CHECK(e.value == doctest::Approx(0.0));
  CHECK(e.gradient[0] == doctest::Approx(0.5));
  CHECK(e.gradient[1] == doctest::Approx(2.0));

  e = eval_f_grad(op, vec({-1.0, 1.0}));
  CHECK_FALSE(e.in_cone);
  CHECK_FALSE(e.evaluable);
}

TEST_CASE("(n-1)-MA values and gradients") {
  EigenOperator op = make_operator(OperatorKind::NMinus1MA, 2);
  SymbolEval e = eval_f_grad(op, vec({3.0, 1.0}));
  CHECK(e.in_cone);
  CHECK(e.value == doctest::Approx(std::log(3.0)));
  CHECK(e.gradient[0] == doctest::Approx(1.0 / 3.0));
  CHECK(e.gradient[1] == doctest::Approx(1.0));
  // for n = 2 the lt vector is a permutation of lambda; evaluable outside
  // Gamma_n needs n >= 3
  e = eval_f_grad(op, vec({3.0, -0.5}));
  CHECK_FALSE(e.in_cone);
  CHECK_FALSE(e.evaluable);
  EigenOperator op3 = make_operator(OperatorKind::NMinus1MA, 3);
  e = eval_f_grad(op3, vec({3.0, 3.0, -0.5}));
  CHECK_FALSE(e.in_cone);
  CHECK(e.evaluable);
  CHECK_THROWS_AS(make_operator(OperatorKind::NMinus1MA, 1),
                  std::invalid_argument);
}

TEST_CASE("gradients match central finite differences over seeded points") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unif(0.05, 4.0);
  for (OperatorKind kind : {OperatorKind::LogMA, OperatorKind::NMinus1MA}) {
    for (int n : {2, 3}) {
      EigenOperator op = make_operator(kind, n);
      for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd lambda(n);
        for (int i = 0; i < n; ++i) lambda[i] = unif(rng);
        SymbolEval e = eval_f_grad(op, lambda);
        REQUIRE(e.evaluable);
        for (int i = 0; i < n; ++i) {
          Eigen::VectorXd lp = lambda, lm = lambda;
          lp[i] += 1e-6;
          lm[i] -= 1e-6;
          const double fd =
              (eval_f_grad(op, lp).value - eval_f_grad(op, lm).value) / 2e-6;
          CHECK(std::abs(fd - e.gradient[i]) <=
                1e-6 * std::max(1.0, std::abs(fd)));
        }
      }
    }
  }
}

TEST_CASE("directional limits are +inf on the admissible rays") {
  EigenOperator log2d = make_operator(OperatorKind::LogMA, 2);
  EigenOperator nm12d = make_operator(OperatorKind::NMinus1MA, 2);
  const auto inf = std::numeric_limits<double>::infinity();
  CHECK(directional_limit(log2d, vec({1.0, 2.0}), 0) == inf);
  CHECK(directional_limit(nm12d, vec({1.0, 2.0}), 1) == inf);
  // ray leaves the cone when an untouched eigenvalue is nonpositive
  CHECK(directional_limit(log2d, vec({1.0, -2.0}), 0) == -inf);
  CHECK(directional_limit(nm12d, vec({-0.5, 2.0}), 1) == -inf);
}

TEST_CASE("linearization: identity and diagonal cases") {
  EigenOperator op = make_operator(OperatorKind::LogMA, 2);
  Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(2, 2);
  OperatorLinearization lin = operator_linearization(op, I, I);
  CHECK(lin.value == doctest::Approx(0.0));
  CHECK((lin.coefficients - I).cwiseAbs().maxCoeff() < 1e-12);

  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(2, 2);
  g(0, 0) = 2.0;
  g(1, 1) = 0.5;
  lin = operator_linearization(op, I, g);
  CHECK(lin.value == doctest::Approx(0.0));
  CHECK(std::abs(lin.coefficients(0, 0).real() - 0.5) < 1e-12);
  CHECK(std::abs(lin.coefficients(1, 1).real() - 2.0) < 1e-12);
  // LogMA identity: coefficients * g = I whenever alpha = I
  CHECK((lin.coefficients * g - I).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("linearization matches directional finite differences") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(-0.5, 0.5);
  auto random_hermitian = [&](int n) {
    Eigen::MatrixXcd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = cplx(unif(rng), unif(rng));
    return Eigen::MatrixXcd(0.5 * (a + a.adjoint()));
  };
  for (OperatorKind kind : {OperatorKind::LogMA, OperatorKind::NMinus1MA}) {
    EigenOperator op = make_operator(kind, 2);
    for (int trial = 0; trial < 25; ++trial) {
      Eigen::MatrixXcd alpha =
          Eigen::MatrixXcd::Identity(2, 2) + 0.3 * random_hermitian(2);
      Eigen::MatrixXcd g =
          Eigen::MatrixXcd::Identity(2, 2) * 1.5 + random_hermitian(2);
      OperatorLinearization lin;
      try {
        lin = operator_linearization(op, alpha, g);
      } catch (const OutOfConeError&) {
        continue;
      } catch (const DefectivePencilError&) {
        continue;
      }
      Eigen::MatrixXcd V = random_hermitian(2);
      const double t = 1e-6;
      const double fp = operator_linearization(op, alpha, g + t * V).value;
      const double fm = operator_linearization(op, alpha, g - t * V).value;
      const double fd = (fp - fm) / (2 * t);
      const double analytic = (lin.coefficients * V).trace().real();
      CHECK(std::abs(fd - analytic) <= 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("linearization refuses out-of-cone and near-defective input") {
  EigenOperator op = make_operator(OperatorKind::LogMA, 2);
  Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(2, 2);
  Eigen::MatrixXcd g = I;
  g(0, 0) = -1.0;
  CHECK_THROWS_AS(operator_linearization(op, I, g), OutOfConeError);
  Eigen::MatrixXcd bad = I;
  bad(1, 1) = 1e-13;
  CHECK_THROWS_AS(operator_linearization(op, bad, I), DefectivePencilError);
}

TEST_CASE("c-subsolution check over fields") {
  auto geom = GridGeometry::make_torus(1, 16, {2 * pi, 2 * pi});
  MetricField alpha = flat_torus_metric(geom);
  ScalarField h(geom->num_nodes(), 3.0);
  EigenOperator op = make_operator(OperatorKind::LogMA, 1);

  SubsolutionReport rep = c_subsolution_check(op, alpha, alpha, h,
                                              SubsolutionMode::EpsilonRHS);
  CHECK(rep.ok);
  CHECK(rep.margin == doctest::Approx(1.0));

  // one bad node is named in the witness
  Form11Field chi = alpha;
  chi.entry(42, 0, 0) = -0.5;
  rep = c_subsolution_check(op, alpha, chi, h, SubsolutionMode::EpsilonRHS);
  CHECK_FALSE(rep.ok);
  CHECK(rep.worst_node == 42);

  // FixedRHS for the (n-1)-MA: the directional limits are infinite whenever
  // the ray stays admissible, so chi = alpha passes any bounded h.
  auto geom2 = GridGeometry::make_torus(2, 8, {2 * pi, 2 * pi, 2 * pi, 2 * pi});
  MetricField alpha2 = flat_torus_metric(geom2);
  ScalarField big_h(geom2->num_nodes(), 100.0);
  EigenOperator nm1 = make_operator(OperatorKind::NMinus1MA, 2);
  rep = c_subsolution_check(nm1, alpha2, alpha2, big_h,
                            SubsolutionMode::FixedRHS);
  CHECK(rep.ok);
}

TEST_CASE("probes: zero violations for the concave symbols, convex control caught") {
  for (int n : {1, 2, 3}) {
    EigenOperator op = make_operator(OperatorKind::LogMA, n);
    ProbeReport rep = concavity_monotonicity_probe(op, 1000, 7);
    CHECK(rep.ok());
    CHECK(rep.max_gradient_fd_error <= 1e-6);
  }
  EigenOperator nm1 = make_operator(OperatorKind::NMinus1MA, 2);
  ProbeReport rep = concavity_monotonicity_probe(nm1, 1000, 7);
  CHECK(rep.ok());

  SymbolFn convex = [](const Eigen::VectorXd& l) {
    SymbolEval e;
    e.in_cone = (l.array() > 0.0).all();
    e.evaluable = e.in_cone;
    if (!e.evaluable) return e;
    e.value = l.squaredNorm();
    e.gradient = 2.0 * l;
    return e;
  };
  ProbeReport neg = probe_symbol(convex, 2, 1000, 7);
  CHECK(neg.concavity_violations > 0);
  CHECK_THROWS_AS(probe_symbol(convex, 2, 50, 7), std::invalid_argument);
}

TEST_CASE("cone monotonicity and permutation symmetry hold pointwise") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unif(0.05, 3.0);
  for (OperatorKind kind : {OperatorKind::LogMA, OperatorKind::NMinus1MA}) {
    EigenOperator op = make_operator(kind, 3);
    for (int trial = 0; trial < 200; ++trial) {
      Eigen::VectorXd l(3);
      for (int i = 0; i < 3; ++i) l[i] = unif(rng);
      Eigen::VectorXd mu = l;
      for (int i = 0; i < 3; ++i) mu[i] += unif(rng);
      CHECK(eval_f_grad(op, mu).value >= eval_f_grad(op, l).value - 1e-12);
      Eigen::VectorXd perm(3);
      perm << l[2], l[0], l[1];
      CHECK(eval_f_grad(op, perm).value ==
            doctest::Approx(eval_f_grad(op, l).value).epsilon(1e-12));
    }
  }
}

TEST_CASE("normalization F(alpha^{-1} chi) = 0 when chi = alpha") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(-0.3, 0.3);
  for (OperatorKind kind : {OperatorKind::LogMA, OperatorKind::NMinus1MA}) {
    EigenOperator op = make_operator(kind, 2);
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::MatrixXcd a(2, 2);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) a(i, j) = cplx(unif(rng), unif(rng));
      Eigen::MatrixXcd alpha =
          Eigen::MatrixXcd::Identity(2, 2) + 0.5 * (a + a.adjoint());
      OperatorLinearization lin = operator_linearization(op, alpha, alpha);
      CHECK(std::abs(lin.value) < 1e-12);
    }
  }
}
