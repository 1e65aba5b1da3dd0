#include "hermbench/eigen_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace hermbench {

EigenOperator make_operator(OperatorKind kind, int dimension) {
  if (dimension < 1)
    throw std::invalid_argument("operator dimension must be positive");
  if (kind == OperatorKind::NMinus1MA && dimension < 2)
    throw std::invalid_argument("the (n-1) Monge-Ampere symbol needs n >= 2");
  return {kind, dimension};
}

SymbolEval eval_f_grad(const EigenOperator& op, const Eigen::VectorXd& lambda) {
  const int n = op.dimension;
  if (lambda.size() != n)
    throw std::invalid_argument("eval_f_grad: wrong eigenvalue count");
  SymbolEval out;
  out.in_cone = (lambda.array() > 0.0).all();
  if (op.kind == OperatorKind::LogMA) {
    out.evaluable = out.in_cone;
    if (!out.evaluable) return out;
    out.value = lambda.array().log().sum();
    out.gradient = lambda.cwiseInverse();
    return out;
  }
  // NMinus1MA: f = sum_k log lt_k, lt_k = (sum lambda - lambda_k)/(n-1).
  const double total = lambda.sum();
  Eigen::VectorXd lt =
      (Eigen::VectorXd::Constant(n, total) - lambda) / double(n - 1);
  out.evaluable = (lt.array() > 0.0).all();
  if (!out.evaluable) return out;
  out.value = lt.array().log().sum();
  out.gradient = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      if (k != i) out.gradient[i] += 1.0 / ((n - 1) * lt[k]);
  return out;
}

double directional_limit(const EigenOperator& op, const Eigen::VectorXd& lambda,
                         int direction) {
  const int n = op.dimension;
  constexpr double inf = std::numeric_limits<double>::infinity();
  // Admissibility of lambda + t e_i for large t: the untouched eigenvalues
  // must be positive.
  for (int j = 0; j < n; ++j)
    if (j != direction && !(lambda[j] > 0.0)) return -inf;
  if (op.kind == OperatorKind::LogMA) {
    // f = sum_j log(lambda_j + t delta_{j,i}) -> +inf.
    return inf;
  }
  // NMinus1MA: every lt_k with k != direction gains t/(n-1) and diverges;
  // lt_direction stays fixed, so the sum tends to +inf whenever it is
  // admissible (lt_direction > 0, implied by lambda_j > 0 for j != i).
  return inf;
}

OperatorLinearization operator_linearization(const EigenOperator& op,
                                             const Eigen::MatrixXcd& alpha,
                                             const Eigen::MatrixXcd& g) {
  const int n = op.dimension;
  OperatorLinearization out;
  Eigen::VectorXd lambda(n);
  Eigen::MatrixXcd W(n, n);  // alpha-orthonormal eigenvectors of the pencil
  if (n == 1) {
    const double a = alpha(0, 0).real();
    if (!(a > 0.0)) throw DefectivePencilError("alpha not positive definite");
    lambda[0] = g(0, 0).real() / a;
    W(0, 0) = 1.0 / std::sqrt(a);
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> chk(alpha,
                                                        Eigen::EigenvaluesOnly);
    const double amin = chk.eigenvalues().minCoeff();
    const double amax = chk.eigenvalues().maxCoeff();
    if (!(amin > 0.0) || amax / amin > 1e12)
      throw DefectivePencilError("pencil conditioning beyond 1e12");
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(g, alpha);
    lambda = es.eigenvalues();
    W = es.eigenvectors();  // normalized so W^H alpha W = I
  }
  SymbolEval f = eval_f_grad(op, lambda);
  if (!f.evaluable || !f.in_cone) {
    std::ostringstream os;
    os << "operator_linearization: eigenvalues out of Gamma_n (min "
       << lambda.minCoeff() << ")";
    throw OutOfConeError(os.str());
  }
  out.value = f.value;
  out.lambda = lambda;
  // dF = sum_i f_i (w_i^H V w_i) = tr(C V), C = sum_i f_i w_i w_i^H.
  out.coefficients = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    out.coefficients += f.gradient[i] * (W.col(i) * W.col(i).adjoint());
  return out;
}

SubsolutionReport c_subsolution_check(const EigenOperator& op,
                                      const MetricField& alpha,
                                      const Form11Field& chi,
                                      const ScalarField& h,
                                      SubsolutionMode mode) {
  SubsolutionReport rep;
  const int n = op.dimension;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es;
  for (std::size_t m = 0; m < alpha.nodes(); ++m) {
    Eigen::VectorXd lambda(n);
    if (n == 1) {
      lambda[0] = chi.entry(m, 0, 0).real() / alpha.entry(m, 0, 0).real();
    } else {
      es.compute(chi.at(m), alpha.at(m), Eigen::EigenvaluesOnly);
      lambda = es.eigenvalues();
    }
    if (mode == SubsolutionMode::EpsilonRHS) {
      // Gamma_n membership; the directional limits are then +inf.
      const double margin = lambda.minCoeff();
      if (margin < rep.margin) {
        rep.margin = margin;
        rep.worst_node = m;
        int dir = 0;
        lambda.minCoeff(&dir);
        rep.worst_direction = dir;
      }
      if (!(lambda.minCoeff() > 0.0)) rep.ok = false;
    } else {
      for (int dir = 0; dir < n; ++dir) {
        const double lim = directional_limit(op, lambda, dir);
        const double margin = lim - h[m];  // +inf unless inadmissible
        if (margin < rep.margin) {
          rep.margin = margin;
          rep.worst_node = m;
          rep.worst_direction = dir;
        }
        if (!(lim > h[m])) rep.ok = false;
      }
    }
  }
  std::ostringstream os;
  os << (rep.ok ? "subsolution holds" : "subsolution fails") << "; worst node "
     << rep.worst_node << ", direction " << rep.worst_direction << ", margin "
     << rep.margin;
  rep.detail = os.str();
  return rep;
}

namespace {

SymbolEval op_symbol(const EigenOperator& op, const Eigen::VectorXd& l) {
  return eval_f_grad(op, l);
}

}  // namespace

ProbeReport probe_symbol(const SymbolFn& f, int n, int trials,
                         std::uint64_t seed) {
  if (trials < 100)
    throw std::invalid_argument("probe_symbol: need at least 100 trials");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.05, 4.0);
  ProbeReport rep;
  rep.trials = trials;
  Eigen::VectorXd a(n), b(n);
  std::vector<int> perm(n);
  for (int t = 0; t < trials; ++t) {
    for (int i = 0; i < n; ++i) {
      a[i] = unif(rng);
      b[i] = unif(rng);
    }
    const SymbolEval fa = f(a), fb = f(b);
    if (!fa.evaluable || !fb.evaluable) continue;
    // midpoint concavity
    const SymbolEval fm = f(0.5 * (a + b));
    if (fm.value < 0.5 * (fa.value + fb.value) - 1e-12)
      ++rep.concavity_violations;
    // gradient positivity
    if ((fa.gradient.array() <= 0.0).any()) ++rep.gradient_violations;
    // monotonicity: f(a + positive bump) >= f(a)
    Eigen::VectorXd bump(n);
    for (int i = 0; i < n; ++i) bump[i] = 0.25 * unif(rng);
    if (f(a + bump).value < fa.value - 1e-12) ++rep.monotonicity_violations;
    // permutation symmetry
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::VectorXd ap(n);
    for (int i = 0; i < n; ++i) ap[i] = a[perm[i]];
    if (std::abs(f(ap).value - fa.value) >
        1e-12 * std::max(1.0, std::abs(fa.value)))
      ++rep.symmetry_violations;
    // analytic gradient against central differences
    const double step = 1e-6;
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd ap1 = a, am1 = a;
      ap1[i] += step;
      am1[i] -= step;
      const double fd = (f(ap1).value - f(am1).value) / (2.0 * step);
      const double rel =
          std::abs(fd - fa.gradient[i]) / std::max(1e-12, std::abs(fd));
      rep.max_gradient_fd_error = std::max(rep.max_gradient_fd_error, rel);
    }
  }
  return rep;
}

ProbeReport concavity_monotonicity_probe(const EigenOperator& op, int trials,
                                         std::uint64_t seed) {
  return probe_symbol(
      [&op](const Eigen::VectorXd& l) { return op_symbol(op, l); },
      op.dimension, trials, seed);
}

}  // namespace hermbench
