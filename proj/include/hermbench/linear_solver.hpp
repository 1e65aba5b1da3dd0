#pragma once

#include <stdexcept>
#include <string>

#include "hermbench/discretization.hpp"

namespace hermbench {

struct LinearSolveFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class LinearSolverKind {
  Auto,            // direct where assembly is supported, else Krylov+Fourier
  DirectSparse,    // assembled sparse LU
  KrylovFourier,   // BiCGStab, constant-coefficient inverse preconditioner
  KrylovJacobi     // BiCGStab, pointwise diagonal preconditioner
};

struct LinearSolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Solve  tr(C Hess x) - eps x = rhs  for x. For eps = 0 on compact
/// geometries the system is solved on the zero-mean subspace. tol is the
/// relative residual target; cap_factor bounds Krylov iterations by
/// cap_factor * sqrt(nodes).
ScalarField solve_linearized(const Discretization& disc, const MatrixField& C,
                             double eps, const ScalarField& rhs,
                             LinearSolverKind kind, double tol,
                             int cap_factor, LinearSolveStats* stats = nullptr);

}  // namespace hermbench
