#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hermbench/cutoff.hpp"
#include "hermbench/instances.hpp"
#include "oracles.hpp"

using namespace hermbench;

TEST_CASE("kappa domain (0, 1/8)") {
  CHECK_THROWS_AS(CutoffFunction(0.2), std::invalid_argument);
  CHECK_THROWS_AS(CutoffFunction(0.125), std::invalid_argument);
  CHECK_THROWS_AS(CutoffFunction(0.0), std::invalid_argument);
  CHECK_THROWS_AS(CutoffFunction(-0.1), std::invalid_argument);
  CHECK_NOTHROW(CutoffFunction(0.1));
}

TEST_CASE("FF vanishes exactly on the plateau") {
  CutoffFunction FF(0.1);
  CHECK(FF.plateau_end() == doctest::Approx(0.91));
  CHECK(FF.value(0.0) == 0.0);
  CHECK(FF.value(0.5) == 0.0);  // exact zero, not merely small
  CHECK(FF.value(FF.plateau_end()) == 0.0);
  CHECK(FF.value(0.92) > 0.0);
}

TEST_CASE("FF against a step-halving Simpson oracle") {
  const double kappa = 0.1;
  CutoffFunction FF(kappa);
  const double s = 1.0 - kappa + 3.0 * kappa * kappa;  // 0.93
  const double oracle = oracles::simpson_adaptive(
      [&](double tau) { return FF.psi(tau) * FF.f_deriv(1, tau); }, 0.0, s);
  CHECK(FF.value(s) == doctest::Approx(oracle).epsilon(1e-10));
  CHECK(FF.value(s) > 0.0);
}

TEST_CASE("FF is monotone nondecreasing") {
  CutoffFunction FF(0.05);
  double prev = -1.0;
  for (int i = 0; i <= 3000; ++i) {
    const double s = i * (0.999999 / 3000);
    const double v = FF.value(s);
    CHECK(v >= prev - 1e-15);
    prev = v;
  }
}

TEST_CASE("psi satisfies the stated support and slope bound") {
  const double kappa = 0.1;
  CutoffFunction FF(kappa);
  const double a = 1 - kappa + kappa * kappa;
  const double b = 1 - kappa + 2 * kappa * kappa;
  CHECK(FF.psi(a) == 0.0);
  CHECK(FF.psi(b) == 1.0);
  for (int i = 0; i <= 2000; ++i) {
    const double s = a + (b - a) * i / 2000.0;
    CHECK(FF.psi_deriv(1, s) >= 0.0);
    CHECK(FF.psi_deriv(1, s) <= 2.0 / (kappa * kappa) + 1e-9);
  }
}

TEST_CASE("exp(-k FF) FF^(k) bounded and refinement-stable for k = 1..3") {
  CutoffFunction FF(0.1);
  auto sweep = [&](int k, int samples) {
    double sup = 0.0;
    for (int i = 0; i < samples; ++i) {
      const double s = 0.90 + (0.9999995 - 0.90) * i / (samples - 1.0);
      const double v = std::exp(-k * FF.value(s)) * std::abs(FF.derivative(k, s));
      sup = std::max(sup, v);
    }
    return sup;
  };
  for (int k = 1; k <= 3; ++k) {
    const double coarse = sweep(k, 40000);
    const double fine = sweep(k, 80000);
    CHECK(std::isfinite(fine));
    CHECK(fine > 0.0);
    CHECK(std::abs(fine - coarse) <= 0.02 * fine);
  }
}

TEST_CASE("FF derivatives agree with finite differences of FF") {
  CutoffFunction FF(0.1);
  for (double s : {0.915, 0.93, 0.96, 0.985}) {
    const double h = 1e-6;
    const double fd = (FF.value(s + h) - FF.value(s - h)) / (2 * h);
    CHECK(FF.derivative(1, s) == doctest::Approx(fd).epsilon(1e-6));
    const double fd2 =
        (FF.value(s + h) - 2 * FF.value(s) + FF.value(s - h)) / (h * h);
    CHECK(FF.derivative(2, s) == doctest::Approx(fd2).epsilon(1e-3));
  }
}

TEST_CASE("conformal truncation is bit-exact on the plateau") {
  auto geom = GridGeometry::make_radial(RadialModel::HyperbolicDisk, 128, 4.0);
  MetricField g = poincare_metric(geom);
  MetricField t = conformal_truncation(g, 4.0, 0.1);
  const double limit = 0.91 * 4.0;
  bool any_scaled = false;
  for (std::size_t m = 0; m < g.nodes(); ++m) {
    if (geom->radial_s()[m] < limit) {
      // identical bits, not merely close
      CHECK(t.entry(m, 0, 0).real() == g.entry(m, 0, 0).real());
    } else if (t.entry(m, 0, 0).real() != g.entry(m, 0, 0).real()) {
      any_scaled = true;
      CHECK(t.entry(m, 0, 0).real() > g.entry(m, 0, 0).real());
    }
  }
  CHECK(any_scaled);
}

TEST_CASE("conformal truncation validates its arguments") {
  auto geom = GridGeometry::make_radial(RadialModel::HyperbolicDisk, 64, 4.0);
  MetricField g = poincare_metric(geom);
  CHECK_THROWS_AS(conformal_truncation(g, 4.0, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(conformal_truncation(g, -1.0, 0.1), std::invalid_argument);
  auto torus = GridGeometry::make_torus(1, 16, {1.0, 1.0});
  CHECK_THROWS_AS(conformal_truncation(flat_torus_metric(torus), 4.0, 0.1),
                  std::invalid_argument);
}
