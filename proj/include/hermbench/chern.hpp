#pragma once

#include <utility>
#include <vector>

#include "hermbench/fields.hpp"
#include "hermbench/grid.hpp"

namespace hermbench {

/// Rank-3 complex tensor per node, indices (i, j, k) with i the raised index:
/// used for Gamma^i_{jk} and T^k_{ij} (stored as T(k, i, j)).
struct Tensor3Field {
  GeometryPtr geom;
  int n = 0;
  std::vector<cplx> data;

  Tensor3Field() = default;
  Tensor3Field(GeometryPtr g, int dim);
  cplx& at(std::size_t node, int a, int b, int c);
  const cplx& at(std::size_t node, int a, int b, int c) const;
};

/// Rank-4 complex tensor per node, indices (i, jbar, k, lbar).
struct Tensor4Field {
  GeometryPtr geom;
  int n = 0;
  std::vector<cplx> data;

  Tensor4Field() = default;
  Tensor4Field(GeometryPtr g, int dim);
  cplx& at(std::size_t node, int a, int b, int c, int d);
  const cplx& at(std::size_t node, int a, int b, int c, int d) const;
};

/// Chern-geometry tensors of a Hermitian metric:
///   Gamma^i_{jk} = g^{il#} d_j g_{kl#}
///   T^k_{ij}     = Gamma^k_{ij} - Gamma^k_{ji}
///   R_{ij#kl#}   = -d_k d_l# g_{ij#} + g^{pq#} (d_k g_{iq#})(d_l# g_{pj#})
///   ricci        = -d_i d_j# log det g            (the Chern-Ricci form)
///   ricci_trace  = g^{kl#} R_{ij#kl#}             (diagnostic; equals ricci
///                                                  only when g is Kaehler)
/// norms are sup-over-nodes of the pointwise tensor norms taken with g.
struct CurvaturePackage {
  Tensor3Field christoffel;  // Gamma^i_{jk} at (i, j, k)
  Tensor3Field torsion;      // T^k_{ij} at (k, i, j)
  Tensor4Field curvature;    // R_{i j# k l#}
  Form11Field ricci;
  Form11Field ricci_trace;
  double sup_torsion = 0.0;        // |T|_g
  double sup_nabla_torsion = 0.0;  // |nabla T|_g
  double sup_curvature = 0.0;      // |Rm|_g
  double sup_ricci = 0.0;          // |Ric|_g
};

/// d^2 u / (dz^i dzbar^j) of a real scalar field; exactly Hermitian
/// (symmetrized after differentiation).
Form11Field complex_hessian(const GeometryPtr& geom, const ScalarField& u);

CurvaturePackage curvature_package(const MetricField& metric);

/// Sup-norms of the coefficients of the (2,2)-form dd#(omega) and the
/// (3,3)-form dd#(omega^2). Both vanish identically by degree when n = 1;
/// the second vanishes identically when n = 2.
std::pair<double, double> gauduchon_residuals(const MetricField& metric);

/// Sup-node operator norm of Ric(g) - lambda * g.
double einstein_residual(const MetricField& metric, double lambda);

/// Empirical curvature discretization unit for a grid: the sup error of
/// curvature_package's Ricci against a closed-form oracle on an analytic
/// test metric living on this grid (one-mode conformal on tori, the
/// hyperbolic model on radial grids). Residual tolerances elsewhere are
/// expressed in multiples of this unit.
double measured_curvature_unit(const GeometryPtr& geom);

}  // namespace hermbench
