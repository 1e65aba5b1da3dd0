#pragma once

#include <memory>

#include <Eigen/Sparse>

#include "hermbench/fields.hpp"

namespace hermbench {

/// The structure a nonlinear solve needs from a geometry: the Hessian-type
/// operator entering g = chi + Hess(u) (the complex Hessian dd# on complex
/// model geometries, the flat real Hessian Dd on Hessian geometries through
/// the tangent-bundle identification), and the application/assembly of the
/// linearized operator  v |-> tr(C Hess v) - eps v  for a Hermitian
/// coefficient field C.
class Discretization {
public:
  virtual ~Discretization() = default;

  virtual std::size_t nodes() const = 0;
  virtual int dim() const = 0;

  virtual MatrixField hessian(const ScalarField& u) const = 0;
  virtual ScalarField apply_linearized(const MatrixField& coeff, double eps,
                                       const ScalarField& v) const = 0;

  /// Compact geometries (tori) carry the constant function in the kernel of
  /// the eps = 0 linearized operator; the solver projects it out.
  virtual bool compact() const = 0;

  /// Approximate inverse used to precondition Krylov iterations; identity by
  /// default. mean_coeff is the averaged diagonal coefficient.
  virtual ScalarField precondition(double mean_coeff, double eps,
                                   const ScalarField& r) const;

  /// Assembled sparse matrix of the linearized operator, when supported
  /// (finite-difference geometries); empty optional behaviour: throws.
  virtual Eigen::SparseMatrix<double> assemble(const MatrixField& coeff,
                                               double eps) const;
  virtual bool supports_assembly() const { return false; }
};

using DiscretizationPtr = std::shared_ptr<const Discretization>;

/// Factory for the complex model geometries.
DiscretizationPtr make_discretization(const GeometryPtr& geom);

}  // namespace hermbench
