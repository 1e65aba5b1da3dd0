#include "hermbench/linear_solver.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/SparseLU>

namespace hermbench {

namespace {

double dot(const ScalarField& a, const ScalarField& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const ScalarField& a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, const ScalarField& x, ScalarField& y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

void project_mean(ScalarField& f) {
  double m = 0.0;
  for (double v : f) m += v;
  m /= static_cast<double>(f.size());
  for (double& v : f) v -= m;
}

double mean_diag_coefficient(const MatrixField& C) {
  double acc = 0.0;
  for (std::size_t m = 0; m < C.nodes(); ++m)
    for (int j = 0; j < C.n(); ++j) acc += C.entry(m, j, j).real();
  return acc / (static_cast<double>(C.nodes()) * C.n());
}

}  // namespace

ScalarField solve_linearized(const Discretization& disc, const MatrixField& C,
                             double eps, const ScalarField& rhs,
                             LinearSolverKind kind, double tol, int cap_factor,
                             LinearSolveStats* stats) {
  if (kind == LinearSolverKind::Auto)
    kind = disc.supports_assembly() ? LinearSolverKind::DirectSparse
                                    : LinearSolverKind::KrylovFourier;

  if (kind == LinearSolverKind::DirectSparse) {
    Eigen::SparseMatrix<double> A = disc.assemble(C, eps);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success)
      throw LinearSolveFailure("sparse LU factorization failed");
    Eigen::Map<const Eigen::VectorXd> b(rhs.data(), rhs.size());
    Eigen::VectorXd x = lu.solve(b);
    if (lu.info() != Eigen::Success)
      throw LinearSolveFailure("sparse LU solve failed");
    if (stats) {
      stats->iterations = 1;
      stats->relative_residual =
          (A * x - b).norm() / std::max(1e-300, b.norm());
    }
    return {x.data(), x.data() + x.size()};
  }

  // Preconditioned BiCGStab on the (sign-definite) linearized operator.
  const bool project = (eps == 0.0) && disc.compact();
  const double cbar = mean_diag_coefficient(C);

  // Jacobi diagonal: the circulant differentiation operators have constant
  // diagonal equal to the mean of their symbol; fold it with the pointwise
  // coefficient trace.
  ScalarField jacobi;
  if (kind == LinearSolverKind::KrylovJacobi) {
    jacobi.assign(disc.nodes(), 1.0);
    // diag(A) = pointwise coefficient trace times the (constant) diagonal of
    // the circulant Hessian-trace operator, recovered from a delta probe.
    ScalarField delta(disc.nodes(), 0.0);
    delta[0] = 1.0;
    MatrixField id(disc.nodes(), disc.dim());
    for (std::size_t m = 0; m < id.nodes(); ++m)
      for (int j = 0; j < disc.dim(); ++j) id.entry(m, j, j) = 1.0;
    ScalarField Ad = disc.apply_linearized(id, 0.0, delta);
    const double lap_diag = Ad[0];
    for (std::size_t m = 0; m < disc.nodes(); ++m) {
      double trc = 0.0;
      for (int j = 0; j < disc.dim(); ++j) trc += C.entry(m, j, j).real();
      const double d = (trc / disc.dim()) * lap_diag - eps;
      jacobi[m] = std::abs(d) > 1e-300 ? d : 1.0;
    }
  }

  auto apply_M = [&](const ScalarField& r) {
    ScalarField out;
    if (kind == LinearSolverKind::KrylovFourier) {
      out = disc.precondition(cbar, eps, r);
    } else {
      out = r;
      for (std::size_t i = 0; i < out.size(); ++i) out[i] /= jacobi[i];
    }
    if (project) project_mean(out);
    return out;
  };
  auto apply_A = [&](const ScalarField& v) {
    ScalarField out = disc.apply_linearized(C, eps, v);
    if (project) project_mean(out);
    return out;
  };

  ScalarField b = rhs;
  if (project) project_mean(b);
  const double bnorm = norm2(b);
  ScalarField x(b.size(), 0.0);
  if (bnorm == 0.0) {
    if (stats) *stats = {0, 0.0};
    return x;
  }

  const int cap = std::max(
      16, cap_factor * static_cast<int>(std::ceil(std::sqrt(
              static_cast<double>(disc.nodes())))));
  ScalarField r = b;  // r = b - A*0
  ScalarField rhat = r;
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  ScalarField v(b.size(), 0.0), p(b.size(), 0.0);
  int iter = 0;
  double rel = 1.0;
  int restarts = 0;
  while (iter < cap) {
    ++iter;
    const double rho1 = dot(rhat, r);
    if (std::abs(rho1) < 1e-300 * bnorm * bnorm) {
      if (++restarts > 3) break;
      rhat = r;
      rho = 1.0;
      alpha = 1.0;
      omega = 1.0;
      std::fill(v.begin(), v.end(), 0.0);
      std::fill(p.begin(), p.end(), 0.0);
      continue;
    }
    const double beta = (rho1 / rho) * (alpha / omega);
    for (std::size_t i = 0; i < p.size(); ++i)
      p[i] = r[i] + beta * (p[i] - omega * v[i]);
    ScalarField phat = apply_M(p);
    v = apply_A(phat);
    const double rv = dot(rhat, v);
    if (std::abs(rv) < 1e-300) {
      if (++restarts > 3) break;
      rhat = r;
      continue;
    }
    alpha = rho1 / rv;
    ScalarField s = r;
    axpy(-alpha, v, s);
    if (norm2(s) / bnorm < tol) {
      axpy(alpha, phat, x);
      rel = norm2(s) / bnorm;
      if (stats) *stats = {iter, rel};
      if (project) project_mean(x);
      return x;
    }
    ScalarField shat = apply_M(s);
    ScalarField t = apply_A(shat);
    const double tt = dot(t, t);
    if (tt < 1e-300) {
      if (++restarts > 3) break;
      rhat = r;
      continue;
    }
    omega = dot(t, s) / tt;
    axpy(alpha, phat, x);
    axpy(omega, shat, x);
    r = s;
    axpy(-omega, t, r);
    rel = norm2(r) / bnorm;
    if (rel < tol) {
      if (stats) *stats = {iter, rel};
      if (project) project_mean(x);
      return x;
    }
    rho = rho1;
  }
  std::ostringstream os;
  os << "inner solver exceeded its cap (" << cap << " iterations, relative "
     << "residual " << rel << ")";
  throw LinearSolveFailure(os.str());
}

}  // namespace hermbench
