#pragma once

#include <memory>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "hermbench/solver.hpp"

namespace hermbench {

struct KappaNotPositive : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class HessianTopology { PeriodicRealTorus, LogOrthantBox };

class HessianGeometry;
using HessianGeometryPtr = std::shared_ptr<const HessianGeometry>;

/// n x n real symmetric matrix per node of a Hessian geometry.
struct RealMatrixField {
  int n = 0;
  std::size_t nodes = 0;
  std::vector<double> data;

  RealMatrixField() = default;
  RealMatrixField(std::size_t num_nodes, int dim)
      : n(dim), nodes(num_nodes), data(num_nodes * dim * dim, 0.0) {}
  Eigen::Map<Eigen::MatrixXd> at(std::size_t node) {
    return {data.data() + node * n * n, n, n};
  }
  Eigen::Map<const Eigen::MatrixXd> at(std::size_t node) const {
    return {data.data() + node * n * n, n, n};
  }
  double min_eigenvalue() const;
};

/// Real model manifolds with a flat connection: a periodic torus in affine
/// coordinates (the metric potential is a fixed quadratic part, carried as
/// metadata so g stays periodic, plus a periodic perturbation) or a box in
/// the log chart t_i = log x_i of the positive orthant. On the box all
/// affine-coordinate derivatives are taken through d/dx_i = e^{-t_i} d/dt_i
/// on the uniform t grid.
class HessianGeometry {
public:
  static HessianGeometryPtr make_torus(int n_real, int resolution,
                                       const std::vector<double>& periods,
                                       const Eigen::MatrixXd& quadratic_part,
                                       const ScalarField& periodic_potential);
  /// Torus with explicitly sampled metric values. When a potential is also
  /// supplied (analytic model data), derivative quantities of phi are
  /// available while g keeps its exact samples.
  static HessianGeometryPtr make_torus_metric(int n_real, int resolution,
                                              const std::vector<double>& periods,
                                              const RealMatrixField& metric,
                                              const ScalarField& potential = {});
  static HessianGeometryPtr make_log_orthant(int n_real, int resolution,
                                             double t_min, double t_max,
                                             const ScalarField& potential);
  /// Orthant box with explicitly sampled metric values (analytic model
  /// data); the optional potential feeds the Hessian-curvature route.
  static HessianGeometryPtr make_log_orthant_metric(
      int n_real, int resolution, double t_min, double t_max,
      const RealMatrixField& metric, const ScalarField& potential = {});
  /// The -sum log x_i model on the orthant box.
  static HessianGeometryPtr make_log_orthant_model(int n_real, int resolution,
                                                   double t_min, double t_max);

  HessianTopology topology() const { return topology_; }
  int n_real() const { return n_; }
  int resolution() const { return resolution_; }
  std::size_t num_nodes() const { return num_nodes_; }
  bool has_potential() const { return has_potential_; }

  const std::vector<double>& periods() const { return periods_; }
  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }

  /// Affine coordinate x^a of a node (torus: x; box: e^t).
  double coordinate(std::size_t node, int axis) const;
  /// Box log-chart coordinate t^a.
  double chart_coordinate(std::size_t node, int axis) const;

  const RealMatrixField& metric() const { return metric_; }
  const ScalarField& potential() const { return potential_; }
  const Eigen::MatrixXd& quadratic_part() const { return quadratic_part_; }

  /// First derivative with respect to the affine coordinate x^a.
  ScalarField dx(const ScalarField& f, int axis) const;
  /// Second derivative d^2 f / dx^i dx^j. Same-axis derivatives use a
  /// dedicated second-derivative stencil (composing first-derivative
  /// operators loses an order at one-sided rows); cross derivatives commute
  /// exactly.
  ScalarField dxdx(const ScalarField& f, int i, int j) const;
  /// Affine-coordinate Hessian D d f (flat connection <=> plain second
  /// partials in affine coordinates).
  RealMatrixField affine_hessian(const ScalarField& f) const;

  std::vector<double> cell_volumes() const;

private:
  HessianGeometry() = default;
  void build_metric_from_potential();

  HessianTopology topology_ = HessianTopology::PeriodicRealTorus;
  int n_ = 1;
  int resolution_ = 0;
  std::size_t num_nodes_ = 0;
  bool has_potential_ = false;

  std::vector<double> periods_;
  Eigen::MatrixXd quadratic_part_;
  double t_min_ = 0.0, t_max_ = 0.0;

  ScalarField potential_;
  RealMatrixField metric_;

  Eigen::MatrixXd d1_, d2_;  // box chart differentiation matrices

  friend class HessianDiscretization;
  friend ScalarField chart_deriv(const HessianGeometry&, const ScalarField&,
                                 int, int);
};

/// alpha_i = (1/2) d_i log det g, kappa_ij = d_j alpha_i, beta = -2 kappa.
struct KoszulData {
  std::vector<double> alpha;  // nodes x n
  RealMatrixField kappa;
  RealMatrixField beta;
};

struct HessianPackage {
  HessianGeometryPtr geometry;
  KoszulData koszul;
  std::vector<double> gamma;  // gamma^i_{jk}: nodes x n^3, (i, j, k)
  std::vector<double> Q;      // Q_{ijkl}: nodes x n^4
  double symmetry_residual = 0.0;  // sup |d_k g_ij - d_i g_kj|
  double gamma_at(std::size_t node, int i, int j, int k) const;
  double q_at(std::size_t node, int i, int j, int k, int l) const;
};

/// Computes the Koszul forms, gamma (the Levi-Civita Christoffel symbols in
/// affine coordinates) and, when a potential is available, the Hessian
/// curvature Q_{ijkl} = (1/2) phi_{ijkl} - (1/2) g^{pq} phi_{ikp} phi_{jlq}.
/// Throws when the metric is not positive or the Hessian symmetry
/// d_k g_ij = d_i g_kj fails beyond tolerance.
HessianPackage hessian_metric_package(const HessianGeometryPtr& hg,
                                      double symmetry_tol = 1e-6);

/// Koszul forms of an arbitrary metric on the same geometry (used to verify
/// beta(g_hat) = -g_hat for solver outputs).
KoszulData koszul_forms(const HessianGeometry& hg, const RealMatrixField& g);

/// The lifted Kaehler metric g^T on the tangent bundle: a Hermitian field on
/// the complex torus grid z^j = xi^j + i xi^{n+j} whose values are
/// g_ij(pi(p)), constant in the fiber directions. Torus bases only.
MetricField tangent_lift(const HessianGeometryPtr& hg);

struct LiftResiduals {
  double curvature = 0.0;  // sup |R^T + (1/2) Q o pi|
  double ricci = 0.0;      // sup |R^T_{ij#} - (1/4) beta_ij o pi|
  double torsion = 0.0;    // |T(g^T)|_g sup (Kaehler check)
};

/// Verifies R^T_{ij#kl#} = -(1/2) Q_ijkl o pi and R^T_{ij#} = (1/4) beta_ij
/// o pi. On torus bases R^T comes from curvature_package on the full
/// tangent_lift grid; on the orthant box the fiber-reduced route (every
/// d/dz^j acting on a fiber-constant field is (1/2) d/dx^j) is used.
LiftResiduals lift_correspondence_check(const HessianGeometryPtr& hg);

/// exp(2 F~) per node for the box exhaustion cutoff, F~(t) = sum_a FF(s_a)
/// with s_a the normalized chart distance from the box center along axis a.
/// Exactly 1.0 on the plateau region.
ScalarField box_cutoff_factor(const HessianGeometry& hg, double kappa);
/// True when every |t_a - center_a| lies below the plateau end of the cutoff.
bool box_plateau_node(const HessianGeometry& hg, double kappa,
                      std::size_t node);

struct HesseEinsteinResult {
  RealMatrixField metric;  // g_hat = -beta(g) + D d u (the inner candidate)
  SolveReport report;
  double residual = 0.0;  // sup over the plateau region of |beta(g_hat) + g_hat|
};

/// Hesse-Einstein solve det(-beta(g) + u_ij) = e^u e^{log det g - log det(-beta)}
/// det(-beta(g)) through the tangent-bundle lift (fiber-constancy reduces the
/// lifted equation back to the base grid; the complex Hessian of u o pi is
/// (1/4) D d u). Requires -beta(g) = 2 kappa(g) positive definite at every
/// node (KappaNotPositive otherwise, with witness). On the orthant box the
/// background is conformally truncated exactly as in the radial exhaustion
/// (the bare window problem is ill-posed) and the Einstein certification is
/// taken on the plateau region where the cutoff is the identity.
HesseEinsteinResult hesse_einstein_solve(const HessianGeometryPtr& hg,
                                         const SolverConfig& cfg,
                                         double kappa = 0.1);

/// Discretization adapter so the shared Newton solver runs on Hessian
/// geometries (real symmetric data embedded as Hermitian fields).
DiscretizationPtr make_hessian_discretization(const HessianGeometryPtr& hg);

/// Real symmetric field as a detached Hermitian MatrixField (imag = 0).
MatrixField embed_real(const RealMatrixField& f);

}  // namespace hermbench
