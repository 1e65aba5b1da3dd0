#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hermbench/grid.hpp"

using namespace hermbench;
constexpr double pi = std::numbers::pi;

TEST_CASE("torus construction and layout") {
  auto g = GridGeometry::make_torus(1, 16, {2 * pi, 2 * pi});
  CHECK(g->num_nodes() == 256);
  CHECK(g->real_dims() == 2);
  CHECK(g->spacing(0) == doctest::Approx(2 * pi / 16));
  // exact wraparound: node coordinates live on [0, L)
  for (std::size_t m = 0; m < g->num_nodes(); ++m) {
    CHECK(g->coordinate(m, 0) < 2 * pi);
    CHECK(g->coordinate(m, 0) >= 0.0);
  }
  auto g2 = GridGeometry::make_torus(2, 8, {2 * pi, 2 * pi, 2 * pi, 2 * pi});
  CHECK(g2->num_nodes() == 4096);
  CHECK(g2->real_dims() == 4);
}

TEST_CASE("torus construction rejects bad input") {
  CHECK_THROWS_AS(GridGeometry::make_torus(1, 7, {2 * pi, 2 * pi}),
                  std::invalid_argument);
  CHECK_THROWS_AS(GridGeometry::make_torus(1, 6, {2 * pi, 2 * pi}),
                  std::invalid_argument);
  CHECK_THROWS_AS(GridGeometry::make_torus(1, 16, {-1.0, 2 * pi}),
                  std::invalid_argument);
  CHECK_THROWS_AS(GridGeometry::make_torus(3, 16, {1, 1, 1, 1, 1, 1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(GridGeometry::make_torus(1, 16, {2 * pi}),
                  std::invalid_argument);
}

TEST_CASE("spectral derivative of a single mode is exact") {
  auto g = GridGeometry::make_torus(1, 16, {2 * pi, 2 * pi});
  ComplexField f(g->num_nodes());
  for (std::size_t m = 0; m < f.size(); ++m)
    f[m] = std::sin(3.0 * g->coordinate(m, 0));
  ComplexField d = deriv_axis(*g, f, 0, 1);
  ComplexField d2 = deriv_axis(*g, f, 0, 2);
  for (std::size_t m = 0; m < f.size(); ++m) {
    const double x = g->coordinate(m, 0);
    CHECK(d[m].real() == doctest::Approx(3.0 * std::cos(3 * x)).epsilon(1e-12));
    CHECK(d2[m].real() ==
          doctest::Approx(-9.0 * std::sin(3 * x)).epsilon(1e-12));
    CHECK(std::abs(d[m].imag()) < 1e-12);
  }
}

TEST_CASE("wirtinger derivative convention d/dz = (dx - i dy)/2") {
  auto g = GridGeometry::make_torus(1, 16, {2 * pi, 2 * pi});
  ComplexField f(g->num_nodes());
  for (std::size_t m = 0; m < f.size(); ++m)
    f[m] = std::cos(g->coordinate(m, 0)) + std::sin(g->coordinate(m, 1));
  ComplexField dz = deriv_z(*g, f, 0);
  for (std::size_t m = 0; m < f.size(); ++m) {
    const double x = g->coordinate(m, 0), y = g->coordinate(m, 1);
    const cplx expect =
        0.5 * (-std::sin(x) - cplx(0, 1) * std::cos(y));
    CHECK(std::abs(dz[m] - expect) < 1e-12);
  }
}

TEST_CASE("radial grid stays strictly inside (0, rho0) and is even-aware") {
  auto g = GridGeometry::make_radial(RadialModel::HyperbolicDisk, 64, 4.0);
  CHECK(g->num_nodes() == 64);
  CHECK(g->radial_s().front() > 0.0);
  CHECK(g->radial_s().back() < 4.0);
  // r = tanh(s/2) chain rule data
  for (std::size_t m = 0; m < g->num_nodes(); ++m) {
    const double s = g->radial_s()[m];
    CHECK(g->radial_r()[m] == doctest::Approx(std::tanh(0.5 * s)));
  }
  // derivative of an even profile: d1 applied to s^2 gives 2s to 4th order
  ScalarField f(g->num_nodes());
  for (std::size_t m = 0; m < f.size(); ++m)
    f[m] = g->radial_s()[m] * g->radial_s()[m];
  Eigen::Map<const Eigen::VectorXd> v(f.data(), f.size());
  Eigen::VectorXd d = g->radial_d1() * v;
  for (std::size_t m = 0; m < f.size(); ++m)
    CHECK(d[m] == doctest::Approx(2.0 * g->radial_s()[m]).epsilon(1e-10));
}

TEST_CASE("fourier poisson solves the shifted laplacian") {
  auto g = GridGeometry::make_torus(1, 32, {2 * pi, 2 * pi});
  ScalarField u_exact(g->num_nodes());
  for (std::size_t m = 0; m < u_exact.size(); ++m)
    u_exact[m] = std::cos(2.0 * g->coordinate(m, 0));
  // (c Lap - eps) u = rhs with c = 0.25, eps = 0.3
  ScalarField rhs(g->num_nodes());
  for (std::size_t m = 0; m < rhs.size(); ++m)
    rhs[m] = (0.25 * (-4.0) - 0.3) * u_exact[m];
  ScalarField u = fourier_poisson(*g, rhs, 0.25, 0.3);
  for (std::size_t m = 0; m < u.size(); ++m)
    CHECK(u[m] == doctest::Approx(u_exact[m]).epsilon(1e-12));
}

TEST_CASE("fd weights reproduce the centered fourth-order stencil") {
  Eigen::VectorXd x(5);
  for (int i = 0; i < 5; ++i) x[i] = i - 2.0;
  Eigen::VectorXd w1 = fd_weights(0.0, x, 1);
  CHECK(w1[0] == doctest::Approx(1.0 / 12));
  CHECK(w1[1] == doctest::Approx(-8.0 / 12));
  CHECK(w1[2] == doctest::Approx(0.0));
  CHECK(w1[3] == doctest::Approx(8.0 / 12));
  CHECK(w1[4] == doctest::Approx(-1.0 / 12));
}
