#include "hermbench/instances.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace hermbench {

MetricField flat_torus_metric(const GeometryPtr& geom) {
  return MetricField::identity(geom, geom->n_complex());
}

MetricField conformal_torus_metric(const GeometryPtr& geom, double amplitude) {
  MetricField g = flat_torus_metric(geom);
  for (std::size_t m = 0; m < g.nodes(); ++m)
    g.entry(m, 0, 0) = std::exp(amplitude * std::cos(geom->coordinate(m, 0)));
  return g;
}

ScalarField poisson_kernel_eta(const GeometryPtr& geom, double a, double q,
                               int kmax) {
  ScalarField eta(geom->num_nodes(), 0.0);
  for (std::size_t m = 0; m < eta.size(); ++m) {
    const double x = geom->coordinate(m, 0);
    double qq = q;
    for (int k = 1; k <= kmax; ++k) {
      eta[m] += a * qq * std::cos(k * x);
      qq *= q;
    }
  }
  return eta;
}

ScalarField poisson_kernel_ricci(const GeometryPtr& geom, double a, double q,
                                 int kmax) {
  ScalarField ric(geom->num_nodes(), 0.0);
  for (std::size_t m = 0; m < ric.size(); ++m) {
    const double x = geom->coordinate(m, 0);
    double qq = q;
    for (int k = 1; k <= kmax; ++k) {
      ric[m] += 0.25 * a * k * k * qq * std::cos(k * x);
      qq *= q;
    }
  }
  return ric;
}

ScalarField compatibility_corrected_cos(const MetricField& omega,
                                        double amplitude) {
  const auto geom = omega.geometry();
  if (amplitude == 0.0) return ScalarField(geom->num_nodes(), 0.0);
  const std::vector<double> w = volume_weights(omega);
  ScalarField base(geom->num_nodes());
  for (std::size_t m = 0; m < base.size(); ++m)
    base[m] = std::cos(geom->coordinate(m, 0));
  // solve mean_w(e^{a(cos x - c)}) = 1 for c by a 1-D Newton iteration
  double c = 0.0;
  for (int it = 0; it < 64; ++it) {
    double num = 0.0, den = 0.0, vol = 0.0;
    for (std::size_t m = 0; m < base.size(); ++m) {
      const double e = std::exp(amplitude * (base[m] - c));
      num += w[m] * (e - 1.0);
      den += w[m] * (-amplitude) * e;
      vol += w[m];
    }
    const double step = num / den;
    c -= step;
    if (std::abs(num / vol) < 1e-15) break;
  }
  ScalarField f(base.size());
  for (std::size_t m = 0; m < base.size(); ++m)
    f[m] = amplitude * (base[m] - c);
  return f;
}

MetricField poincare_metric(const GeometryPtr& geom) {
  MetricField g(geom, 1);
  for (std::size_t m = 0; m < g.nodes(); ++m) {
    const double r = geom->radial_r()[m];
    const double d = 1.0 - r * r;
    g.entry(m, 0, 0) = 2.0 / (d * d);
  }
  return g;
}

MetricField perturbed_poincare_metric(const GeometryPtr& geom, double amp,
                                      double center, double width) {
  MetricField g = poincare_metric(geom);
  for (std::size_t m = 0; m < g.nodes(); ++m) {
    const double w = (geom->radial_s()[m] - center) / width;
    if (std::abs(w) < 1.0) {
      const double eta = amp * std::exp(1.0 - 1.0 / (1.0 - w * w));
      g.entry(m, 0, 0) *= std::exp(eta);
    }
  }
  return g;
}

ScalarField random_trig_field(const GeometryPtr& geom, double sup_bound,
                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const bool torus = geom->topology() == Topology::PeriodicTorus;
  const int dims = torus ? geom->real_dims() : 1;
  const int modes = 3;
  ScalarField f(geom->num_nodes(), 0.0);
  for (int d = 0; d < dims; ++d)
    for (int k = 1; k <= modes; ++k) {
      const double ac = unif(rng), as = unif(rng);
      const double L = torus ? geom->periods()[d] : geom->truncation_radius();
      for (std::size_t m = 0; m < f.size(); ++m) {
        const double x =
            torus ? geom->coordinate(m, d) : geom->radial_s()[m];
        const double ang = 2.0 * std::numbers::pi * k * x / L;
        // radial profiles must stay even across the origin
        f[m] += torus ? (ac * std::cos(ang) + as * std::sin(ang)) / (k * k)
                      : ac * std::cos(ang) / (k * k);
      }
    }
  const double sup = sup_abs(f);
  if (sup > 0)
    for (double& v : f) v *= sup_bound / sup;
  return f;
}

HessianGeometryPtr lift_study_geometry(int resolution, double a, double q,
                                       int kmax) {
  const double L = 2.0 * std::numbers::pi;
  RealMatrixField g(static_cast<std::size_t>(resolution), 1);
  ScalarField phi(static_cast<std::size_t>(resolution), 0.0);
  for (int m = 0; m < resolution; ++m) {
    const double x = L * m / resolution;
    double gv = 1.0, pv = 0.0, qq = q;
    for (int k = 1; k <= kmax; ++k) {
      gv += a * qq * std::cos(k * x);
      pv -= a * qq * std::cos(k * x) / (k * k);
      qq *= q;
    }
    g.at(static_cast<std::size_t>(m))(0, 0) = gv;
    phi[static_cast<std::size_t>(m)] = pv;
  }
  return HessianGeometry::make_torus_metric(1, resolution, {L}, g, phi);
}

ScalarField lift_study_beta_exact(const HessianGeometry& hg, double a, double q,
                                  int kmax) {
  ScalarField beta(hg.num_nodes());
  for (std::size_t m = 0; m < beta.size(); ++m) {
    const double x = hg.coordinate(m, 0);
    double g = 1.0, g1 = 0.0, g2 = 0.0, qq = q;
    for (int k = 1; k <= kmax; ++k) {
      g += a * qq * std::cos(k * x);
      g1 -= a * qq * k * std::sin(k * x);
      g2 -= a * qq * k * k * std::cos(k * x);
      qq *= q;
    }
    beta[m] = -(g2 * g - g1 * g1) / (g * g);
  }
  return beta;
}

}  // namespace hermbench
