#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hermbench/discretization.hpp"
#include "hermbench/eigen_ops.hpp"
#include "hermbench/linear_solver.hpp"

namespace hermbench {

struct LineSearchStalled : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConeExit : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PathStalled : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverConfig {
  double tol = 1e-10;       // sup-residual termination
  int max_iterations = 50;
  double min_step = 1e-8;   // line-search floor
  double armijo = 1e-4;     // sufficient-decrease constant on the sup-residual
  LinearSolverKind linear = LinearSolverKind::Auto;
  double linear_tol = 1e-12;
  int linear_cap_factor = 10;  // iteration cap = factor * sqrt(nodes)
  bool record_history = true;
  std::string stage = "newton";
};

struct IterationRow {
  std::string stage;
  double t = 0.0;
  double epsilon = 0.0;
  int iter = 0;
  double residual_sup = 0.0;
  double min_eig = 0.0;
  double step_size = 0.0;
};

struct SolveReport {
  ScalarField solution;
  double residual_sup = 0.0;
  int iterations = 0;
  bool converged = false;
  double eig_min = 0.0;  // c_min: c_min * alpha <= chi + Hess u nodewise
  double eig_max = 0.0;  // c_max
  bool c0_bound_ok = false;
  int path_halvings = 0;  // populated by continuity_path
  std::vector<IterationRow> history;
};

/// One instance of F(alpha^{ip#}(chi + Hess u)_{jp#}) = t h + eps u.
struct ProblemSpec {
  DiscretizationPtr disc;
  MetricField alpha;
  Form11Field chi;
  ScalarField h;
  double epsilon = 0.0;
  EigenOperator op;
};

/// Convenience constructor for complex model geometries (derives the
/// discretization from alpha's geometry).
ProblemSpec make_problem(const MetricField& alpha, const Form11Field& chi,
                         const ScalarField& h, double epsilon,
                         const EigenOperator& op);

/// Checks the ProblemSpec invariants: alpha positive definite, the
/// eigenvalues of alpha^{-1} chi in Gamma_n at every node, and (for eps > 0)
/// the EpsilonRHS C-subsolution condition. Throws std::invalid_argument.
void validate_problem(const ProblemSpec& p);

/// Damped Newton for F(alpha^{-1}(chi + Hess u)) = t h + eps u. Backtracking
/// halves the step until the Gamma_n constraint holds and the sup-residual
/// satisfies the Armijo decrease. Throws LineSearchStalled / ConeExit /
/// LinearSolveFailure; reaching the iteration cap returns converged = false.
SolveReport newton_solve(const ProblemSpec& p, double t, const ScalarField& init,
                         const SolverConfig& cfg);

/// Continuity method in t from 0 to 1 with adaptive halving of the t-step on
/// Newton failure (minimum step 1/1024). Returns the t = 1 report; the
/// number of halvings is reported in the history stage tags.
SolveReport continuity_path(const ProblemSpec& p, int steps,
                            const SolverConfig& cfg);

struct EpsilonPathResult {
  std::vector<double> epsilons;
  std::vector<SolveReport> stages;
  std::vector<double> cauchy_diffs;  // ||u_k - u_{k+1}||_sup
  bool cauchy = true;                // false when the differences increase
  bool compatibility_applicable = false;
  bool compatibility_ok = false;
  double compatibility_integral = 0.0;
  bool extrapolated_valid = false;
  ScalarField extrapolated;           // Richardson extrapolation in eps to 0
  double extrapolated_residual = 0.0; // sup-residual in the eps = 0 equation
};

/// Solves at each eps (strictly decreasing, positive) with warm starts.
/// When the compatibility integral int (e^h - 1) dV_alpha vanishes to
/// quadrature tolerance on a compact geometry, extrapolates to eps = 0
/// (polynomial extrapolation through the provided eps values) and evaluates
/// the unperturbed residual.
EpsilonPathResult epsilon_path(const ProblemSpec& p,
                               const std::vector<double>& eps_sequence,
                               const SolverConfig& cfg);

/// sup|u| <= sup|F(alpha^{ip#}chi_{jp#}) - t h| / eps + 1e-9.
bool c0_bound_check(const ProblemSpec& p, double t, const SolveReport& report);
double c0_bound_value(const ProblemSpec& p, double t);

struct ExhaustionResult {
  std::vector<double> rhos;
  std::vector<SolveReport> stages;
  std::vector<double> inner_diffs;  // successive sup-differences on the inner region
  bool stabilized = false;
  ScalarField solution;   // final-stage solution
  GeometryPtr geometry;   // final-stage geometry
};

/// Exhaustion scheme: for each rho in the increasing schedule, builds the
/// conformally truncated data (e^{2F~} alpha, e^{2F~} chi) on the grid
/// produced by `builder`, solves, and compares successive solutions on the
/// fixed inner region {s < (1 - kappa + kappa^2) rho_min}. The builder must
/// return problems on grids sharing the radial spacing so inner nodes align.
ExhaustionResult exhaustion_solve(
    const std::function<ProblemSpec(double)>& builder,
    const std::vector<double>& rhos, double kappa, const SolverConfig& cfg,
    double inner_tol);

}  // namespace hermbench
