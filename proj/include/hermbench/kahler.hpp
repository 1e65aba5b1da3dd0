#pragma once

#include <stdexcept>
#include <vector>

#include "hermbench/chern.hpp"
#include "hermbench/solver.hpp"

namespace hermbench {

struct RicciNotNegative : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CompatibilityViolated : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PositivityLost : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct StepTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct KahlerEinsteinResult {
  MetricField metric;  // h0 + i dd# u with h0 = -Ric(alpha)
  SolveReport report;
  double einstein_residual = 0.0;  // sup |Ric(g) + g|
};

/// Kaehler-Einstein construction: requires Ric(alpha) negative definite,
/// sets h0 = -Ric(alpha), h = log(det alpha / det h0), and solves
/// det(h0 + i dd# u) = e^{u + h} det(h0) (LogMA with eps = 1, chi = h0).
/// On truncated radial grids the data is conformally truncated first (the
/// bare window problem is ill-posed: its one-sided closure carries
/// near-singular boundary modes) and the Einstein residual is measured on
/// the region where the truncation is the identity.
KahlerEinsteinResult kahler_einstein_solve(const MetricField& alpha,
                                           const SolverConfig& cfg,
                                           double kappa = 0.1);

/// Same recipe driven through the exhaustion scheme on truncated radial
/// grids: `alpha_builder` returns the background metric on a grid of radius
/// rho (grids must share spacing).
struct KahlerEinsteinExhaustionResult {
  ExhaustionResult exhaustion;
  MetricField metric;  // final-stage Einstein candidate on the inner data
  double einstein_residual = 0.0;
};
KahlerEinsteinExhaustionResult kahler_einstein_exhaustion(
    const std::function<MetricField(double)>& alpha_builder,
    const std::vector<double>& rhos, double kappa, const SolverConfig& cfg,
    double inner_tol);

struct PrescribedRicciResult {
  MetricField metric;  // omega_phi = omega + i dd# phi
  EpsilonPathResult path;
  double ricci_identity_residual = 0.0;  // sup |Ric(omega_phi) - (Ric(omega) - i dd# f)|
  std::pair<double, double> gauduchon;   // residuals of omega_phi
};

/// Prescribed Chern-Ricci solve via the delta-perturbed Monge-Ampere family
/// (omega + i dd# phi)^n = e^{f + delta phi} omega^n. On compact models the
/// compatibility integral int (e^f - 1) omega^n = 0 must hold to quadrature
/// tolerance before the delta -> 0 extrapolation is attempted; otherwise
/// CompatibilityViolated carries the measured integral.
PrescribedRicciResult prescribed_ricci_solve(
    const MetricField& omega, const ScalarField& f,
    const std::vector<double>& delta_sequence, const SolverConfig& cfg);

struct FlowTrajectory {
  std::vector<double> times;          // starts at 0
  std::vector<MetricField> metrics;   // metrics[0] is the initial metric, bit-exact
  std::vector<double> sup_rm;         // sup |Rm|
  std::vector<double> max_ricci_eig;  // r(t): max Ricci quadratic form, unit g(t)-directions
  std::vector<double> min_metric_eig;
  // Generalized bounds against the initial metric (uniform equivalence).
  std::vector<double> equiv_min, equiv_max;
};

/// Kaehler-Ricci flow dg/dt = -4 Ric(g), explicit Euler with Ricci
/// recomputed from curvature_package each step. dt must satisfy
/// 0.2 * h_min^2 / (4 * sup eig g0^{-1}) (StepTooLarge otherwise); aborts
/// with PositivityLost if a step leaves the positive cone.
FlowTrajectory kahler_ricci_flow(const MetricField& g0, double t_final,
                                 double dt);

double flow_stable_dt(const MetricField& g0);

struct FlowBoundReport {
  bool ok = false;
  double fitted_slope = 0.0;          // smallest A with r(t) <= A t - kappa over the data
  double kappa = 0.0;
  std::vector<double> margins;        // A t - kappa - r(t) per time
  double sup_rm_sq = 0.0;             // max over trajectory of sup|Rm|^2
};

/// Maximum-principle envelope monitor: with r(t) the trajectory's max Ricci
/// quadratic form, checks sup|Rm|^2 <= k0 and sup|r| <= C0 over the run and
/// r(0) <= -kappa, then fits the smallest affine envelope r(t) <= A t -
/// kappa. C1 only caps the acceptable fitted slope (A <= C0*C2(n)*sqrt(k0)
/// + C1 is not enforced numerically; the monitor is normalization-free).
FlowBoundReport flow_bound_monitor(const FlowTrajectory& traj, double C0,
                                   double C1, double k0, double kappa);

}  // namespace hermbench
