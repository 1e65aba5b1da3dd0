#pragma once

#include "hermbench/fields.hpp"
#include "hermbench/hessian.hpp"

namespace hermbench {

/// Model data used by the pipeline scenarios and the verification suites.

MetricField flat_torus_metric(const GeometryPtr& geom);

/// e^{eta} * flat with eta = amplitude * cos(x^1).
MetricField conformal_torus_metric(const GeometryPtr& geom, double amplitude);

/// Conformal factor with geometric spectrum eta = a sum_{k>=1} q^k cos(k x^1)
/// and its closed-form Chern-Ricci coefficient (a/4) sum k^2 q^k cos(k x^1).
ScalarField poisson_kernel_eta(const GeometryPtr& geom, double a, double q,
                               int kmax);
ScalarField poisson_kernel_ricci(const GeometryPtr& geom, double a, double q,
                                 int kmax);

/// f = amplitude * (cos x^1 - c) with c chosen so that
/// int (e^f - 1) dV_omega = 0 on the grid (volume form of omega).
ScalarField compatibility_corrected_cos(const MetricField& omega,
                                        double amplitude);

/// The hyperbolic model g_{11#} = 2/(1-|z|^2)^2 on a radial grid; satisfies
/// Ric(g) = -g.
MetricField poincare_metric(const GeometryPtr& geom);

/// e^{eta} * poincare with eta a compactly supported radial bump
/// amp * exp(1 - 1/(1-w^2)), w = (s - center)/width.
MetricField perturbed_poincare_metric(const GeometryPtr& geom, double amp,
                                      double center, double width);

/// Seeded random low-frequency trigonometric field with sup bound.
ScalarField random_trig_field(const GeometryPtr& geom, double sup_bound,
                              std::uint64_t seed);

/// Tangent-lift refinement-study instance: a 1-D Hessian torus whose metric
/// g = 1 + a sum_k q^k cos(k x) is sampled from its closed form while the
/// matching periodic potential part -a sum_k q^k cos(k x)/k^2 (the quadratic
/// part x^2/2 is metadata-free here since only third and fourth derivatives
/// enter Q) is carried for the Hessian-curvature route. The two routes then
/// differ by genuine discretization, giving measurable decay orders.
HessianGeometryPtr lift_study_geometry(int resolution, double a, double q,
                                       int kmax = 200);
/// Closed-form beta_11 = -(d/dx)^2 log g for the study metric.
ScalarField lift_study_beta_exact(const HessianGeometry& hg, double a, double q,
                                  int kmax = 200);

}  // namespace hermbench
