#pragma once

#include <stdexcept>

#include "hermbench/fields.hpp"

namespace hermbench {

/// The exhaustion cutoff profile
///   f(s)   = -log[1 - ((s - 1 + kappa)/kappa)^2]   on (1 - kappa, 1), 0 before;
///   FF(s)  = int_0^s psi(t) f'(t) dt,
/// where psi is a quintic smoothstep supported on [1 - kappa + kappa^2,
/// 1 - kappa + 2 kappa^2] with 0 <= psi' <= 2/kappa^2. FF vanishes
/// identically (returned as exact 0.0) for s <= 1 - kappa + kappa^2, is
/// nondecreasing, and exp(-k FF) FF^(k) stays bounded for every k.
///
/// Requires 0 < kappa < 1/8.
class CutoffFunction {
public:
  explicit CutoffFunction(double kappa);

  double kappa() const { return kappa_; }
  /// Start of the transition band, 1 - kappa + kappa^2: FF == 0 at or below.
  double plateau_end() const { return a_; }

  double f(double s) const;
  double f_deriv(int k, double s) const;  // k = 1, 2, 3
  double psi(double s) const;
  double psi_deriv(int k, double s) const;  // k = 1, 2

  double value(double s) const;           // FF(s)
  double derivative(int k, double s) const;  // FF^(k), k = 1, 2, 3

private:
  double kappa_;
  double a_;  // 1 - kappa + kappa^2
  double b_;  // 1 - kappa + 2 kappa^2
  double f_at_b_;
};

/// Conformal factor exp(2 * FF(s / rho0)) per node of a radial geometry.
ScalarField conformal_factor(const GeometryPtr& geom, double rho0,
                             double kappa);

/// g~ = e^{2F~} g with F~(x) = FF(rho~(x)/rho0); leaves every node with
/// rho~ < (1 - kappa + kappa^2) rho0 bit-identical to the input.
MetricField conformal_truncation(const MetricField& metric, double rho0,
                                 double kappa);

}  // namespace hermbench
