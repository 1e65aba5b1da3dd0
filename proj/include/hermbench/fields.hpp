#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hermbench/grid.hpp"

namespace hermbench {

/// One n x n complex matrix per grid node, stored contiguously. Used both
/// for Hermitian metrics g_{ij#} (positive definite) and for general real
/// (1,1)-forms such as chi, Psi, Ric and i*dd#u (Hermitian, not necessarily
/// positive).
class MatrixField {
public:
  MatrixField() = default;
  MatrixField(GeometryPtr geom, int n);
  /// Detached field (no grid geometry attached); used by the Hessian-manifold
  /// solves where the nodes belong to a HessianGeometry.
  MatrixField(std::size_t nodes, int n);

  int n() const { return n_; }
  std::size_t nodes() const { return nodes_; }
  const GeometryPtr& geometry() const { return geom_; }

  Eigen::Map<Eigen::MatrixXcd> at(std::size_t node) {
    return {data_.data() + node * n_ * n_, n_, n_};
  }
  Eigen::Map<const Eigen::MatrixXcd> at(std::size_t node) const {
    return {data_.data() + node * n_ * n_, n_, n_};
  }

  cplx& entry(std::size_t node, int i, int j) {
    return data_[node * n_ * n_ + static_cast<std::size_t>(j) * n_ + i];
  }
  const cplx& entry(std::size_t node, int i, int j) const {
    return data_[node * n_ * n_ + static_cast<std::size_t>(j) * n_ + i];
  }

  /// Gather/scatter the (i,j) entry across all nodes.
  ComplexField entry_field(int i, int j) const;
  void set_entry_field(int i, int j, const ComplexField& f);

  std::vector<cplx>& raw() { return data_; }
  const std::vector<cplx>& raw() const { return data_; }

  /// A <- (A + A^H)/2 at every node.
  void hermitize();
  /// sup over nodes of max |A - A^H| entry.
  double hermitian_defect() const;
  /// Smallest/largest eigenvalue over all nodes (selfadjoint part).
  double min_eigenvalue() const;
  double max_eigenvalue() const;

  MatrixField& operator+=(const MatrixField& other);
  MatrixField& operator-=(const MatrixField& other);
  MatrixField& operator*=(double s);

  static MatrixField identity(GeometryPtr geom, int n);
  /// Conformal field e^{eta} * I for scalar eta (n = 1) or scale the given
  /// base pointwise.
  static MatrixField scaled(const MatrixField& base, const ScalarField& factor);

private:
  GeometryPtr geom_;
  int n_ = 0;
  std::size_t nodes_ = 0;
  std::vector<cplx> data_;
};

using MetricField = MatrixField;
using Form11Field = MatrixField;

/// Throws std::invalid_argument with a worst-node witness if the field is
/// not Hermitian to 1e-12 (relative) or not positive definite.
void check_metric(const MatrixField& m);
/// Hermitian-only variant for general (1,1)-forms.
void check_form(const MatrixField& m);

/// Nodewise generalized eigenvalue bounds of the pencil (a, b):
/// returns (min over nodes of lambda_min, max over nodes of lambda_max) with
/// b positive definite.
std::pair<double, double> pencil_bounds(const MatrixField& a,
                                        const MatrixField& b);

/// Volume weights det(g) * cell_volume per node (used for compatibility
/// integrals and mean normalizations against the volume form of g).
std::vector<double> volume_weights(const MatrixField& g);

}  // namespace hermbench
