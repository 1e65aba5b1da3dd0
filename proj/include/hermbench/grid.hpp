#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Dense>

namespace hermbench {

using cplx = std::complex<double>;
using ScalarField = std::vector<double>;
using ComplexField = std::vector<cplx>;

enum class Topology { PeriodicTorus, TruncatedRadial };

/// Radial model geometries are stored as 1-D profiles in the model's exact
/// radial distance coordinate s; EuclideanDisk has s = r, HyperbolicDisk is
/// the unit disk with g_{11#} = 2/(1-|z|^2)^2 and s = log((1+r)/(1-r)).
enum class RadialModel { EuclideanDisk, HyperbolicDisk };

class GridGeometry;
using GeometryPtr = std::shared_ptr<const GridGeometry>;

/// A discretized model manifold: either a flat periodic torus of complex
/// dimension 1 or 2 (uniform grid, trigonometric differentiation), or a
/// truncated radially symmetric disk model (1-D profile, fourth-order
/// centered finite differences with even reflection across the origin).
///
/// Complex-derivative convention used throughout:
///   d/dz = (d/dx - i d/dy)/2,   d/dzbar = (d/dx + i d/dy)/2.
///
/// Geometries are immutable after construction and safe to share across
/// threads.
class GridGeometry {
public:
  static GeometryPtr make_torus(int n_complex, int resolution,
                                const std::vector<double>& periods);
  static GeometryPtr make_radial(RadialModel model, int resolution,
                                 double truncation_radius);

  Topology topology() const { return topology_; }
  int n_complex() const { return n_complex_; }
  int resolution() const { return resolution_; }
  std::size_t num_nodes() const { return num_nodes_; }

  /// Number of stored real coordinate directions (2n for a torus, 1 for a
  /// radial profile).
  int real_dims() const;

  // --- torus accessors -----------------------------------------------------
  /// Axis ordering: axis 2j is x^j, axis 2j+1 is y^j, axis 0 fastest.
  const std::vector<double>& periods() const { return periods_; }
  double spacing(int axis) const;
  double min_spacing() const;
  double coordinate(std::size_t node, int axis) const;
  std::size_t axis_index(std::size_t node, int axis) const;

  // --- radial accessors ----------------------------------------------------
  RadialModel radial_model() const { return radial_model_; }
  double truncation_radius() const { return truncation_radius_; }
  /// Model distance values s_j = (j + 1/2) * h, h = rho0 / resolution.
  const std::vector<double>& radial_s() const { return s_; }
  /// Euclidean radius r(s) of the model chart.
  const std::vector<double>& radial_r() const { return r_; }
  /// dr/ds and d^2r/ds^2 per node.
  const std::vector<double>& radial_drds() const { return rp_; }
  const std::vector<double>& radial_d2rds2() const { return rpp_; }
  /// Dense differentiation matrices in s (even reflection at the origin,
  /// one-sided fourth-order rows at the truncation end).
  const Eigen::MatrixXd& radial_d1() const { return d1_; }
  const Eigen::MatrixXd& radial_d2() const { return d2_; }

  /// Cell volume of the coordinate grid (product of spacings for a torus;
  /// 2*pi*r*(dr/ds)*h for the radial annulus at each node).
  std::vector<double> cell_volumes() const;

  bool same_layout(const GridGeometry& other) const;

private:
  GridGeometry() = default;

  Topology topology_ = Topology::PeriodicTorus;
  int n_complex_ = 1;
  int resolution_ = 0;
  std::size_t num_nodes_ = 0;

  // torus
  std::vector<double> periods_;

  // radial
  RadialModel radial_model_ = RadialModel::EuclideanDisk;
  double truncation_radius_ = 0.0;
  std::vector<double> s_, r_, rp_, rpp_;
  Eigen::MatrixXd d1_, d2_;
};

// --- differentiation -------------------------------------------------------

/// Spectral derivative of a complex field along a torus real axis.
/// order 1 uses the ik multiplier with the Nyquist mode zeroed; order 2 uses
/// -k^2 including the Nyquist mode.
ComplexField deriv_axis(const GridGeometry& g, const ComplexField& f, int axis,
                        int order);

/// Wirtinger derivatives d/dz^k and d/dzbar^k of a complex field. On a
/// radial geometry these return the theta = 0 representative of the radial
/// profile.
ComplexField deriv_z(const GridGeometry& g, const ComplexField& f, int k);
ComplexField deriv_zbar(const GridGeometry& g, const ComplexField& f, int k);

/// Mixed second derivative d^2/(dz^i dzbar^j).
ComplexField deriv_z_zbar(const GridGeometry& g, const ComplexField& f, int i,
                          int j);

/// Solve (c * laplace_x - eps) u = rhs on a torus in Fourier space, with the
/// mean mode mapped to (-eps) (or, when eps == 0, projected out). laplace_x
/// is the full real-coordinate Laplacian. Used as preconditioner and in
/// test oracles.
ScalarField fourier_poisson(const GridGeometry& g, const ScalarField& rhs,
                            double c, double eps);

ComplexField to_complex(const ScalarField& f);
ScalarField real_part(const ComplexField& f);
double sup_abs(const ScalarField& f);
double sup_abs(const ComplexField& f);
double mean(const std::vector<double>& w, const ScalarField& f);

// --- low-level tensor-grid helpers (shared with the real Hessian models) ---

/// Finite-difference weights (Fornberg) for the m-th derivative at x0 from
/// arbitrary nodes x.
Eigen::VectorXd fd_weights(double x0, const Eigen::VectorXd& x, int m);

/// Fourier multiplier of the order-th derivative on N periodic points over
/// period L (Nyquist zeroed for odd orders).
std::vector<cplx> spectral_symbol(int N, double L, int order);

/// Apply a Fourier multiplier along one axis of a tensor grid with num_axes
/// axes of N points each (axis 0 fastest).
void tensor_axis_symbol(ComplexField& f, int num_axes, int N, int axis,
                        const std::vector<cplx>& symbol);

/// Apply a dense 1-D operator along one axis of a tensor grid.
void tensor_axis_matrix(ComplexField& f, int num_axes, int N, int axis,
                        const Eigen::MatrixXd& M);

/// Solve (c * Lap - eps) u = rhs on an num_axes-dimensional periodic tensor
/// grid (zero mode projected out when eps == 0).
ScalarField tensor_fourier_solve(const ScalarField& rhs, int num_axes, int N,
                                 const std::vector<double>& periods, double c,
                                 double eps);

}  // namespace hermbench
