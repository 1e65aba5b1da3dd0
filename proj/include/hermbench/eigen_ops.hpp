#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "hermbench/fields.hpp"

namespace hermbench {

/// Symmetric concave symbols on the positive orthant Gamma_n:
///   LogMA:      f(lambda) = sum_i log lambda_i
///   NMinus1MA:  f(lambda) = sum_k log lt_k, lt_k = (1/(n-1)) sum_{i != k} lambda_i
/// (n >= 2 for NMinus1MA). The admissibility cone is fixed to Gamma_n.
enum class OperatorKind { LogMA, NMinus1MA };

struct EigenOperator {
  OperatorKind kind = OperatorKind::LogMA;
  int dimension = 1;
};

EigenOperator make_operator(OperatorKind kind, int dimension);

struct SymbolEval {
  bool in_cone = false;    // lambda in Gamma_n
  bool evaluable = false;  // f defined at lambda (for NMinus1MA: lt in Gamma_n)
  double value = 0.0;
  Eigen::VectorXd gradient;
};

/// Value and gradient of f at lambda; refuses to evaluate (evaluable=false)
/// outside the symbol's domain rather than extending by -inf.
SymbolEval eval_f_grad(const EigenOperator& op, const Eigen::VectorXd& lambda);

/// lim_{t->inf} f(lambda + t e_i). For both supported symbols this is +inf
/// whenever lambda + t e_i stays admissible for large t (all other
/// eigenvalue data positive); returns -inf when the ray leaves the domain.
double directional_limit(const EigenOperator& op, const Eigen::VectorXd& lambda,
                         int direction);

struct OperatorLinearization {
  double value = 0.0;             // F(A), A = alpha^{-1} g
  Eigen::MatrixXcd coefficients;  // dF/dg entries: Hermitian PD on Gamma_n
  Eigen::VectorXd lambda;         // eigenvalues of the pencil (g, alpha)
};

struct OutOfConeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DefectivePencilError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// F(A) and the derivative of F with respect to the entries of g with alpha
/// held fixed, via the spectral decomposition of the Hermitian pencil
/// (g, alpha): coefficients = sum_i f_i(lambda) w_i w_i^H with w_i^H alpha
/// w_j = delta_ij. The pairing is dF = tr(coefficients * V) for a Hermitian
/// variation V of g. For LogMA the coefficients reduce to g^{-1}.
OperatorLinearization operator_linearization(const EigenOperator& op,
                                             const Eigen::MatrixXcd& alpha,
                                             const Eigen::MatrixXcd& g);

enum class SubsolutionMode { FixedRHS, EpsilonRHS };

struct SubsolutionReport {
  bool ok = true;
  std::size_t worst_node = 0;
  int worst_direction = 0;
  double margin = std::numeric_limits<double>::infinity();
  std::string detail;
};

/// C-subsolution test for u = 0: eigenvalues of alpha^{ip#} chi_{jp#} per
/// node. EpsilonRHS requires lambda in Gamma_n everywhere (the directional
/// limits are then +inf); FixedRHS compares the per-direction limits against
/// h(x). The report carries the worst node/direction.
SubsolutionReport c_subsolution_check(const EigenOperator& op,
                                      const MetricField& alpha,
                                      const Form11Field& chi,
                                      const ScalarField& h,
                                      SubsolutionMode mode);

struct ProbeReport {
  int trials = 0;
  int concavity_violations = 0;
  int monotonicity_violations = 0;
  int symmetry_violations = 0;
  int gradient_violations = 0;  // nonpositive analytic gradient components
  double max_gradient_fd_error = 0.0;
  bool ok() const {
    return concavity_violations == 0 && monotonicity_violations == 0 &&
           symmetry_violations == 0 && gradient_violations == 0;
  }
};

using SymbolFn =
    std::function<SymbolEval(const Eigen::VectorXd&)>;  // test-injectable

/// Seeded randomized probe of midpoint concavity, componentwise
/// monotonicity, permutation symmetry and gradient positivity on Gamma_n.
ProbeReport concavity_monotonicity_probe(const EigenOperator& op, int trials,
                                         std::uint64_t seed);
ProbeReport probe_symbol(const SymbolFn& f, int n, int trials,
                         std::uint64_t seed);

}  // namespace hermbench
