#include "hermbench/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "hermbench/cutoff.hpp"

namespace hermbench {

ProblemSpec make_problem(const MetricField& alpha, const Form11Field& chi,
                         const ScalarField& h, double epsilon,
                         const EigenOperator& op) {
  ProblemSpec p;
  p.disc = make_discretization(alpha.geometry());
  p.alpha = alpha;
  p.chi = chi;
  p.h = h;
  p.epsilon = epsilon;
  p.op = op;
  return p;
}

void validate_problem(const ProblemSpec& p) {
  check_metric(p.alpha);
  check_form(p.chi);
  const auto [lo, hi] = pencil_bounds(p.chi, p.alpha);
  (void)hi;
  if (!(lo > 0.0)) {
    std::ostringstream os;
    os << "lambda[alpha^{-1} chi] leaves Gamma_n (min eigenvalue " << lo << ")";
    throw std::invalid_argument(os.str());
  }
  if (p.epsilon > 0.0) {
    const SubsolutionReport rep = c_subsolution_check(
        p.op, p.alpha, p.chi, p.h, SubsolutionMode::EpsilonRHS);
    if (!rep.ok)
      throw std::invalid_argument("0 is not a C-subsolution: " + rep.detail);
  }
}

namespace {

struct State {
  bool cone_ok = true;
  std::size_t worst_node = 0;
  double min_lambda = 0.0;
  double residual_sup = 0.0;
  ScalarField residual;
  MatrixField coeffs;
  MatrixField g;  // chi + Hess u
};

// Pointwise pencil pass: eigenvalues of alpha^{-1}(chi + Hess u), the symbol
// value and (optionally) the linearization coefficients.
State eval_state(const ProblemSpec& p, double t, const ScalarField& u,
                 bool need_coeffs) {
  const int n = p.op.dimension;
  const std::size_t nodes = p.disc->nodes();
  State st;
  st.residual.assign(nodes, 0.0);
  st.g = p.chi;
  MatrixField H = p.disc->hessian(u);
  st.g += H;
  if (need_coeffs) st.coeffs = MatrixField(nodes, n);
  st.min_lambda = std::numeric_limits<double>::max();

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es;
  Eigen::VectorXd lambda(n);
  for (std::size_t m = 0; m < nodes; ++m) {
    Eigen::MatrixXcd W;
    if (n == 1) {
      const double a = p.alpha.entry(m, 0, 0).real();
      lambda[0] = st.g.entry(m, 0, 0).real() / a;
      if (need_coeffs) {
        W.resize(1, 1);
        W(0, 0) = 1.0 / std::sqrt(a);
      }
    } else {
      es.compute(st.g.at(m), p.alpha.at(m),
                 need_coeffs ? Eigen::ComputeEigenvectors
                             : Eigen::EigenvaluesOnly);
      lambda = es.eigenvalues();
      if (need_coeffs) W = es.eigenvectors();
    }
    if (lambda.minCoeff() < st.min_lambda) {
      st.min_lambda = lambda.minCoeff();
      st.worst_node = m;
    }
    const SymbolEval f = eval_f_grad(p.op, lambda);
    if (!f.in_cone || !f.evaluable) {
      st.cone_ok = false;
      return st;  // caller rejects the iterate; nothing else is meaningful
    }
    st.residual[m] = f.value - t * p.h[m] - p.epsilon * u[m];
    if (need_coeffs) {
      auto C = st.coeffs.at(m);
      for (int i = 0; i < n; ++i)
        C += f.gradient[i] * (W.col(i) * W.col(i).adjoint());
    }
  }
  st.residual_sup = sup_abs(st.residual);
  return st;
}

void normalize_mean(const ProblemSpec& p, ScalarField& u) {
  if (p.epsilon != 0.0 || !p.disc->compact()) return;
  double m = 0.0;
  for (double v : u) m += v;
  m /= static_cast<double>(u.size());
  for (double& v : u) v -= m;
}

}  // namespace

SolveReport newton_solve(const ProblemSpec& p, double t, const ScalarField& init,
                         const SolverConfig& cfg) {
  if (init.size() != p.disc->nodes())
    throw std::invalid_argument("newton_solve: init has wrong size");
  SolveReport rep;
  ScalarField u = init;
  normalize_mean(p, u);
  State st = eval_state(p, t, u, true);
  if (!st.cone_ok) {
    std::ostringstream os;
    os << "initial iterate leaves Gamma_n at node " << st.worst_node;
    throw ConeExit(os.str());
  }

  double last_step = 0.0;
  int iter = 0;
  for (;; ++iter) {
    if (cfg.record_history)
      rep.history.push_back({cfg.stage, t, p.epsilon, iter, st.residual_sup,
                             st.min_lambda, last_step});
    if (st.residual_sup < cfg.tol) {
      rep.converged = true;
      break;
    }
    if (iter >= cfg.max_iterations) break;

    ScalarField rhs(st.residual.size());
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = -st.residual[i];
    ScalarField delta =
        solve_linearized(*p.disc, st.coeffs, p.epsilon, rhs, cfg.linear,
                         cfg.linear_tol, cfg.linear_cap_factor);

    double s = 1.0;
    bool cone_seen = false;
    for (;;) {
      ScalarField trial(u.size());
      for (std::size_t i = 0; i < u.size(); ++i) trial[i] = u[i] + s * delta[i];
      normalize_mean(p, trial);
      State ts = eval_state(p, t, trial, true);
      if (ts.cone_ok) {
        cone_seen = true;
        if (ts.residual_sup <= (1.0 - cfg.armijo * s) * st.residual_sup) {
          u = std::move(trial);
          st = std::move(ts);
          last_step = s;
          break;
        }
      }
      s *= 0.5;
      if (s < cfg.min_step) {
        if (!cone_seen)
          throw ConeExit("no feasible step along the Newton direction");
        std::ostringstream os;
        os << "line search stalled at step " << s << " (residual "
           << st.residual_sup << ")";
        throw LineSearchStalled(os.str());
      }
    }
  }

  rep.solution = std::move(u);
  rep.residual_sup = st.residual_sup;
  rep.iterations = iter;
  const auto [lo, hi] = pencil_bounds(st.g, p.alpha);
  rep.eig_min = lo;
  rep.eig_max = hi;
  rep.c0_bound_ok = true;
  if (p.epsilon > 0.0 && rep.converged) rep.c0_bound_ok = c0_bound_check(p, t, rep);
  return rep;
}

SolveReport continuity_path(const ProblemSpec& p, int steps,
                            const SolverConfig& cfg) {
  if (steps < 1) throw std::invalid_argument("continuity_path: steps >= 1");
  if (!(p.epsilon > 0.0))
    throw std::invalid_argument("continuity_path: requires epsilon > 0");
  const double base_dt = 1.0 / steps;
  const double min_dt = 1.0 / 1024.0;

  SolverConfig scfg = cfg;
  ScalarField u(p.disc->nodes(), 0.0);
  std::vector<IterationRow> history;
  int halvings = 0;

  auto solve_at = [&](double t, SolveReport& out) {
    std::ostringstream os;
    os << "continuity";
    scfg.stage = os.str();
    out = newton_solve(p, t, u, scfg);
    history.insert(history.end(), out.history.begin(), out.history.end());
    return out.converged;
  };

  SolveReport rep;
  if (!solve_at(0.0, rep)) throw PathStalled("no solution at t = 0");
  u = rep.solution;

  double t = 0.0, dt = base_dt;
  while (t < 1.0 - 1e-15) {
    const double next = std::min(1.0, t + dt);
    bool ok = false;
    SolveReport stage;
    try {
      ok = solve_at(next, stage);
    } catch (const LineSearchStalled&) {
      ok = false;
    } catch (const ConeExit&) {
      ok = false;
    } catch (const LinearSolveFailure&) {
      ok = false;
    }
    if (ok) {
      t = next;
      u = stage.solution;
      rep = std::move(stage);
      dt = std::min(dt * 2.0, base_dt);
    } else {
      dt *= 0.5;
      ++halvings;
      if (dt < min_dt) {
        std::ostringstream os;
        os << "continuity path stalled at t = " << t << " with dt = " << dt;
        throw PathStalled(os.str());
      }
    }
  }
  rep.history = std::move(history);
  rep.path_halvings = halvings;
  return rep;
}

EpsilonPathResult epsilon_path(const ProblemSpec& p,
                               const std::vector<double>& eps_sequence,
                               const SolverConfig& cfg) {
  if (eps_sequence.empty())
    throw std::invalid_argument("epsilon_path: empty schedule");
  for (std::size_t i = 0; i < eps_sequence.size(); ++i) {
    if (!(eps_sequence[i] > 0.0))
      throw std::invalid_argument("epsilon_path: epsilons must be positive");
    if (i > 0 && !(eps_sequence[i] < eps_sequence[i - 1]))
      throw std::invalid_argument("epsilon_path: schedule must decrease");
  }
  EpsilonPathResult out;
  out.epsilons = eps_sequence;

  // Compatibility integral int (e^h - 1) dV_alpha on compact geometries.
  if (p.alpha.geometry() &&
      p.alpha.geometry()->topology() == Topology::PeriodicTorus) {
    out.compatibility_applicable = true;
    const std::vector<double> w = volume_weights(p.alpha);
    double integral = 0.0, vol = 0.0;
    for (std::size_t m = 0; m < w.size(); ++m) {
      integral += w[m] * std::expm1(p.h[m]);
      vol += w[m];
    }
    out.compatibility_integral = integral / vol;
    out.compatibility_ok = std::abs(out.compatibility_integral) <= 1e-9;
  }

  SolverConfig scfg = cfg;
  ScalarField u(p.disc->nodes(), 0.0);
  for (double eps : eps_sequence) {
    ProblemSpec pe = p;
    pe.epsilon = eps;
    std::ostringstream os;
    os << "epsilon-path";
    scfg.stage = os.str();
    SolveReport r = newton_solve(pe, 1.0, u, scfg);
    u = r.solution;
    out.stages.push_back(std::move(r));
  }
  for (std::size_t k = 0; k + 1 < out.stages.size(); ++k) {
    double d = 0.0;
    const auto& a = out.stages[k].solution;
    const auto& b = out.stages[k + 1].solution;
    for (std::size_t i = 0; i < a.size(); ++i)
      d = std::max(d, std::abs(a[i] - b[i]));
    out.cauchy_diffs.push_back(d);
  }
  for (std::size_t k = 0; k + 1 < out.cauchy_diffs.size(); ++k)
    if (out.cauchy_diffs[k + 1] > out.cauchy_diffs[k]) out.cauchy = false;

  const bool do_extrapolate =
      !out.compatibility_applicable || out.compatibility_ok;
  if (do_extrapolate && out.stages.size() >= 2) {
    // Polynomial extrapolation in eps to 0 through all stages (the leading
    // dependence is first order; higher orders are mopped up by the extra
    // nodes).
    const std::size_t K = out.stages.size();
    std::vector<double> weight(K, 1.0);
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t j = 0; j < K; ++j)
        if (j != k)
          weight[k] *= (0.0 - eps_sequence[j]) /
                       (eps_sequence[k] - eps_sequence[j]);
    ScalarField ext(u.size(), 0.0);
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t i = 0; i < ext.size(); ++i)
        ext[i] += weight[k] * out.stages[k].solution[i];
    ProblemSpec p0 = p;
    p0.epsilon = 0.0;
    State st = eval_state(p0, 1.0, ext, false);
    if (st.cone_ok) {
      out.extrapolated_valid = true;
      out.extrapolated = std::move(ext);
      out.extrapolated_residual = st.residual_sup;
    }
  }
  return out;
}

double c0_bound_value(const ProblemSpec& p, double t) {
  ScalarField zero(p.disc->nodes(), 0.0);
  State st = eval_state(p, t, zero, false);
  if (!st.cone_ok)
    throw std::invalid_argument("c0_bound_value: chi itself leaves Gamma_n");
  // residual at u = 0 is F(alpha^{-1} chi) - t h
  return st.residual_sup;
}

bool c0_bound_check(const ProblemSpec& p, double t, const SolveReport& report) {
  if (!(p.epsilon > 0.0))
    throw std::invalid_argument("c0_bound_check: requires epsilon > 0");
  const double bound = c0_bound_value(p, t) / p.epsilon;
  return sup_abs(report.solution) <= bound + 1e-9;
}

ExhaustionResult exhaustion_solve(
    const std::function<ProblemSpec(double)>& builder,
    const std::vector<double>& rhos, double kappa, const SolverConfig& cfg,
    double inner_tol) {
  if (rhos.empty()) throw std::invalid_argument("exhaustion_solve: no rhos");
  for (std::size_t i = 1; i < rhos.size(); ++i)
    if (!(rhos[i] > rhos[i - 1]))
      throw std::invalid_argument("exhaustion_solve: rhos must increase");
  CutoffFunction FF(kappa);  // validates kappa in (0, 1/8)
  const double s_lim = FF.plateau_end() * rhos.front();

  ExhaustionResult out;
  out.rhos = rhos;
  ScalarField prev;
  GeometryPtr prev_geom;
  for (double rho : rhos) {
    ProblemSpec p = builder(rho);
    const GeometryPtr geom = p.alpha.geometry();
    if (!geom || geom->topology() != Topology::TruncatedRadial)
      throw std::invalid_argument(
          "exhaustion_solve: builder must produce truncated radial problems");
    p.alpha = conformal_truncation(p.alpha, rho, kappa);
    p.chi = conformal_truncation(p.chi, rho, kappa);

    SolverConfig scfg = cfg;
    scfg.stage = "exhaustion";
    ScalarField zero(geom->num_nodes(), 0.0);
    SolveReport r = newton_solve(p, 1.0, zero, scfg);

    if (!prev.empty()) {
      double diff = 0.0;
      for (std::size_t j = 0; j < prev_geom->num_nodes(); ++j) {
        const double s = prev_geom->radial_s()[j];
        if (s >= s_lim) break;
        if (std::abs(s - geom->radial_s()[j]) > 1e-12)
          throw std::invalid_argument(
              "exhaustion_solve: grids do not share the radial spacing");
        diff = std::max(diff, std::abs(prev[j] - r.solution[j]));
      }
      out.inner_diffs.push_back(diff);
    }
    prev = r.solution;
    prev_geom = geom;
    out.stages.push_back(std::move(r));
  }
  out.stabilized =
      !out.inner_diffs.empty() && out.inner_diffs.back() < inner_tol;
  out.solution = prev;
  out.geometry = prev_geom;
  return out;
}

}  // namespace hermbench
