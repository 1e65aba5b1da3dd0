#include "hermbench/hessian.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "hermbench/chern.hpp"
#include "hermbench/cutoff.hpp"

namespace hermbench {

double RealMatrixField::min_eigenvalue() const {
  double worst = std::numeric_limits<double>::max();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  for (std::size_t m = 0; m < nodes; ++m) {
    if (n == 1) {
      worst = std::min(worst, at(m)(0, 0));
    } else {
      es.compute(at(m), Eigen::EigenvaluesOnly);
      worst = std::min(worst, es.eigenvalues().minCoeff());
    }
  }
  return worst;
}

// -- geometry -----------------------------------------------------------------

namespace {

std::size_t pow_sz(int base, int exp) {
  std::size_t v = 1;
  for (int i = 0; i < exp; ++i) v *= static_cast<std::size_t>(base);
  return v;
}

void check_real_dims(int n_real, int resolution) {
  if (n_real < 1 || n_real > 3)
    throw std::invalid_argument("HessianGeometry: 1 <= n_real <= 3");
  if (resolution < 8 || resolution % 2 != 0)
    throw std::invalid_argument(
        "HessianGeometry: resolution must be even and at least 8");
}

}  // namespace

ScalarField chart_deriv(const HessianGeometry& hg, const ScalarField& f,
                        int axis, int order) {
  ComplexField c = to_complex(f);
  if (hg.topology() == HessianTopology::PeriodicRealTorus) {
    tensor_axis_symbol(c, hg.n_real(), hg.resolution(), axis,
                       spectral_symbol(hg.resolution(),
                                       hg.periods().at(axis), order));
  } else {
    tensor_axis_matrix(c, hg.n_real(), hg.resolution(), axis,
                       order == 1 ? hg.d1_ : hg.d2_);
  }
  return real_part(c);
}

HessianGeometryPtr HessianGeometry::make_torus(
    int n_real, int resolution, const std::vector<double>& periods,
    const Eigen::MatrixXd& quadratic_part, const ScalarField& periodic_potential) {
  check_real_dims(n_real, resolution);
  if (static_cast<int>(periods.size()) != n_real)
    throw std::invalid_argument("make_torus: one period per direction");
  auto hg = std::shared_ptr<HessianGeometry>(new HessianGeometry());
  hg->topology_ = HessianTopology::PeriodicRealTorus;
  hg->n_ = n_real;
  hg->resolution_ = resolution;
  hg->num_nodes_ = pow_sz(resolution, n_real);
  hg->periods_ = periods;
  hg->quadratic_part_ = quadratic_part;
  hg->potential_ = periodic_potential;
  if (periodic_potential.size() != hg->num_nodes_)
    throw std::invalid_argument("make_torus: potential has wrong size");
  hg->has_potential_ = true;
  hg->build_metric_from_potential();
  return hg;
}

HessianGeometryPtr HessianGeometry::make_torus_metric(
    int n_real, int resolution, const std::vector<double>& periods,
    const RealMatrixField& metric, const ScalarField& potential) {
  check_real_dims(n_real, resolution);
  auto hg = std::shared_ptr<HessianGeometry>(new HessianGeometry());
  hg->topology_ = HessianTopology::PeriodicRealTorus;
  hg->n_ = n_real;
  hg->resolution_ = resolution;
  hg->num_nodes_ = pow_sz(resolution, n_real);
  hg->periods_ = periods;
  hg->quadratic_part_ = Eigen::MatrixXd::Zero(n_real, n_real);
  hg->metric_ = metric;
  if (!potential.empty()) {
    if (potential.size() != hg->num_nodes_)
      throw std::invalid_argument("make_torus_metric: potential has wrong size");
    hg->potential_ = potential;
    hg->has_potential_ = true;
  }
  return hg;
}

HessianGeometryPtr HessianGeometry::make_log_orthant(int n_real, int resolution,
                                                     double t_min, double t_max,
                                                     const ScalarField& potential) {
  check_real_dims(n_real, resolution);
  if (!(t_max > t_min))
    throw std::invalid_argument("make_log_orthant: t_max must exceed t_min");
  auto hg = std::shared_ptr<HessianGeometry>(new HessianGeometry());
  hg->topology_ = HessianTopology::LogOrthantBox;
  hg->n_ = n_real;
  hg->resolution_ = resolution;
  hg->num_nodes_ = pow_sz(resolution, n_real);
  hg->t_min_ = t_min;
  hg->t_max_ = t_max;
  hg->quadratic_part_ = Eigen::MatrixXd::Zero(n_real, n_real);
  if (potential.size() != hg->num_nodes_)
    throw std::invalid_argument("make_log_orthant: potential has wrong size");
  hg->potential_ = potential;
  hg->has_potential_ = true;

  // One-dimensional fourth-order differentiation on the endpoint-inclusive
  // chart grid, one-sided rows at both edges (no parity structure here).
  const int N = resolution;
  const double ht = (t_max - t_min) / (N - 1);
  hg->d1_ = Eigen::MatrixXd::Zero(N, N);
  hg->d2_ = Eigen::MatrixXd::Zero(N, N);
  Eigen::VectorXd tloc;
  for (int j = 0; j < N; ++j) {
    int lo = std::clamp(j - 2, 0, N - 5);
    int w = 5;
    if (j - lo > 2 || lo + w - 1 - j > 2 || j < 2 || j > N - 3) w = 6;
    lo = std::clamp(j - w / 2, 0, N - w);
    tloc.resize(w);
    for (int k = 0; k < w; ++k) tloc[k] = (lo + k) * ht;
    const Eigen::VectorXd w1 = fd_weights(j * ht, tloc, 1);
    const Eigen::VectorXd w2 = fd_weights(j * ht, tloc, 2);
    for (int k = 0; k < w; ++k) {
      hg->d1_(j, lo + k) = w1[k];
      hg->d2_(j, lo + k) = w2[k];
    }
  }
  hg->build_metric_from_potential();
  return hg;
}

HessianGeometryPtr HessianGeometry::make_log_orthant_metric(
    int n_real, int resolution, double t_min, double t_max,
    const RealMatrixField& metric, const ScalarField& potential) {
  auto hg = make_log_orthant(n_real, resolution, t_min, t_max,
                             potential.empty()
                                 ? ScalarField(pow_sz(resolution, n_real), 0.0)
                                 : potential);
  auto* mut = const_cast<HessianGeometry*>(hg.get());
  mut->metric_ = metric;
  mut->has_potential_ = !potential.empty();
  return hg;
}

HessianGeometryPtr HessianGeometry::make_log_orthant_model(int n_real,
                                                           int resolution,
                                                           double t_min,
                                                           double t_max) {
  // phi(x) = -sum log x_i = -sum t_i on the chart grid.
  const std::size_t nodes = pow_sz(resolution, n_real);
  const double ht = (t_max - t_min) / (resolution - 1);
  ScalarField phi(nodes, 0.0);
  for (std::size_t m = 0; m < nodes; ++m) {
    std::size_t idx = m;
    for (int a = 0; a < n_real; ++a) {
      phi[m] -= t_min + static_cast<double>(idx % resolution) * ht;
      idx /= resolution;
    }
  }
  auto hg = make_log_orthant(n_real, resolution, t_min, t_max, phi);
  // install the closed-form metric g_ij = delta_ij / x_i^2 (the factory owns
  // the object; it has not been shared as const yet)
  auto* mut = const_cast<HessianGeometry*>(hg.get());
  for (std::size_t m = 0; m < nodes; ++m) {
    mut->metric_.at(m).setZero();
    for (int a = 0; a < n_real; ++a) {
      const double x = hg->coordinate(m, a);
      mut->metric_.at(m)(a, a) = 1.0 / (x * x);
    }
  }
  return hg;
}

double HessianGeometry::chart_coordinate(std::size_t node, int axis) const {
  std::size_t idx = node;
  for (int a = 0; a < axis; ++a) idx /= resolution_;
  const double j = static_cast<double>(idx % resolution_);
  if (topology_ == HessianTopology::PeriodicRealTorus)
    return j * periods_[axis] / resolution_;
  return t_min_ + j * (t_max_ - t_min_) / (resolution_ - 1);
}

double HessianGeometry::coordinate(std::size_t node, int axis) const {
  const double t = chart_coordinate(node, axis);
  return topology_ == HessianTopology::PeriodicRealTorus ? t : std::exp(t);
}

ScalarField HessianGeometry::dx(const ScalarField& f, int axis) const {
  ScalarField d = chart_deriv(*this, f, axis, 1);
  if (topology_ == HessianTopology::LogOrthantBox)
    for (std::size_t m = 0; m < d.size(); ++m)
      d[m] *= std::exp(-chart_coordinate(m, axis));
  return d;
}

ScalarField HessianGeometry::dxdx(const ScalarField& f, int i, int j) const {
  if (i != j) return dx(dx(f, std::max(i, j)), std::min(i, j));
  if (topology_ == HessianTopology::PeriodicRealTorus)
    return chart_deriv(*this, f, i, 2);
  // d^2/dx^2 = e^{-2t} (d^2/dt^2 - d/dt) in the log chart
  ScalarField d1 = chart_deriv(*this, f, i, 1);
  ScalarField d2 = chart_deriv(*this, f, i, 2);
  ScalarField out(f.size());
  for (std::size_t m = 0; m < f.size(); ++m)
    out[m] = std::exp(-2.0 * chart_coordinate(m, i)) * (d2[m] - d1[m]);
  return out;
}

RealMatrixField HessianGeometry::affine_hessian(const ScalarField& f) const {
  RealMatrixField H(num_nodes_, n_);
  for (int i = 0; i < n_; ++i) {
    for (int j = i; j < n_; ++j) {
      ScalarField hij = dxdx(f, i, j);
      for (std::size_t m = 0; m < num_nodes_; ++m) {
        H.at(m)(i, j) = hij[m];
        H.at(m)(j, i) = hij[m];
      }
    }
  }
  return H;
}

void HessianGeometry::build_metric_from_potential() {
  metric_ = affine_hessian(potential_);
  if (topology_ == HessianTopology::PeriodicRealTorus)
    for (std::size_t m = 0; m < num_nodes_; ++m) metric_.at(m) += quadratic_part_;
}

std::vector<double> HessianGeometry::cell_volumes() const {
  std::vector<double> v(num_nodes_, 1.0);
  if (topology_ == HessianTopology::PeriodicRealTorus) {
    double cell = 1.0;
    for (int a = 0; a < n_; ++a) cell *= periods_[a] / resolution_;
    std::fill(v.begin(), v.end(), cell);
  } else {
    const double ht = (t_max_ - t_min_) / (resolution_ - 1);
    for (std::size_t m = 0; m < num_nodes_; ++m) {
      double cell = 1.0;
      for (int a = 0; a < n_; ++a)
        cell *= ht * std::exp(chart_coordinate(m, a));  // dx = e^t dt
      v[m] = cell;
    }
  }
  return v;
}

// -- Koszul forms / package ----------------------------------------------------

KoszulData koszul_forms(const HessianGeometry& hg, const RealMatrixField& g) {
  const int n = hg.n_real();
  const std::size_t nodes = hg.num_nodes();
  ScalarField logdet(nodes);
  for (std::size_t m = 0; m < nodes; ++m) {
    const double det = n == 1 ? g.at(m)(0, 0) : g.at(m).determinant();
    if (!(det > 0.0))
      throw std::invalid_argument("koszul_forms: metric not positive");
    logdet[m] = std::log(det);
  }
  KoszulData out;
  out.alpha.assign(nodes * n, 0.0);
  out.beta = RealMatrixField(nodes, n);
  for (int i = 0; i < n; ++i) {
    ScalarField a = hg.dx(logdet, i);
    for (std::size_t m = 0; m < nodes; ++m) out.alpha[m * n + i] = 0.5 * a[m];
  }
  // kappa_ij = d_j alpha_i = (1/2) d_i d_j log det g
  RealMatrixField half_dd = hg.affine_hessian(logdet);
  out.kappa = RealMatrixField(nodes, n);
  for (std::size_t m = 0; m < nodes; ++m) {
    out.kappa.at(m) = 0.5 * half_dd.at(m);
    out.beta.at(m) = -2.0 * out.kappa.at(m);
  }
  return out;
}

double HessianPackage::gamma_at(std::size_t node, int i, int j, int k) const {
  const int n = geometry->n_real();
  return gamma[((node * n + i) * n + j) * n + k];
}

double HessianPackage::q_at(std::size_t node, int i, int j, int k, int l) const {
  const int n = geometry->n_real();
  return Q[(((node * n + i) * n + j) * n + k) * n + l];
}

HessianPackage hessian_metric_package(const HessianGeometryPtr& hg,
                                      double symmetry_tol) {
  const int n = hg->n_real();
  const std::size_t nodes = hg->num_nodes();
  const RealMatrixField& g = hg->metric();
  if (!(g.min_eigenvalue() > 0.0))
    throw std::invalid_argument(
        "hessian_metric_package: metric not positive definite");

  HessianPackage pkg;
  pkg.geometry = hg;
  pkg.koszul = koszul_forms(*hg, g);

  // dg[k](i,j) = d g_ij / d x^k
  std::vector<RealMatrixField> dg(n, RealMatrixField(nodes, n));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      ScalarField e(nodes);
      for (std::size_t m = 0; m < nodes; ++m) e[m] = g.at(m)(i, j);
      for (int k = 0; k < n; ++k) {
        ScalarField d = hg->dx(e, k);
        for (std::size_t m = 0; m < nodes; ++m) {
          dg[k].at(m)(i, j) = d[m];
          dg[k].at(m)(j, i) = d[m];
        }
      }
    }

  double sym = 0.0;
  for (std::size_t m = 0; m < nodes; ++m)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          sym = std::max(sym,
                         std::abs(dg[k].at(m)(i, j) - dg[i].at(m)(k, j)));
  pkg.symmetry_residual = sym;
  if (!(sym <= symmetry_tol)) {
    std::ostringstream os;
    os << "input metric is not Hessian: symmetry defect " << sym;
    throw std::invalid_argument(os.str());
  }

  // gamma^i_{jk}: Levi-Civita Christoffel symbols in affine coordinates.
  pkg.gamma.assign(nodes * n * n * n, 0.0);
  for (std::size_t m = 0; m < nodes; ++m) {
    Eigen::MatrixXd ginv = n == 1
                               ? Eigen::MatrixXd::Constant(1, 1, 1.0 / g.at(m)(0, 0))
                               : g.at(m).inverse().eval();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double s = 0.0;
          for (int l = 0; l < n; ++l)
            s += 0.5 * ginv(i, l) *
                 (dg[j].at(m)(k, l) + dg[k].at(m)(j, l) - dg[l].at(m)(j, k));
          pkg.gamma[((m * n + i) * n + j) * n + k] = s;
        }
  }

  // Hessian curvature from the potential.
  if (hg->has_potential()) {
    const ScalarField& phi = hg->potential();
    // derivatives of phi (the quadratic part drops out beyond second order)
    std::vector<std::vector<ScalarField>> d2(n, std::vector<ScalarField>(n));
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) {
        d2[a][b] = hg->dxdx(phi, a, b);
        d2[b][a] = d2[a][b];
      }
    std::vector<std::vector<std::vector<ScalarField>>> d3(
        n, std::vector<std::vector<ScalarField>>(n, std::vector<ScalarField>(n)));
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          d3[a][b][c] = hg->dx(d2[a][b], c);
          if (a != b) d3[b][a][c] = d3[a][b][c];
        }

    std::vector<Eigen::MatrixXd> ginv(nodes);
    for (std::size_t m = 0; m < nodes; ++m)
      ginv[m] = n == 1 ? Eigen::MatrixXd::Constant(1, 1, 1.0 / g.at(m)(0, 0))
                       : g.at(m).inverse().eval();
    pkg.Q.assign(nodes * n * n * n * n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            ScalarField d4 = hg->dxdx(d2[i][j], k, l);
            for (std::size_t m = 0; m < nodes; ++m) {
              double s = 0.5 * d4[m];
              for (int p = 0; p < n; ++p)
                for (int q = 0; q < n; ++q)
                  s -= 0.5 * ginv[m](p, q) * d3[std::min(i, k)][std::max(i, k)][p][m] *
                       d3[std::min(j, l)][std::max(j, l)][q][m];
              pkg.Q[(((m * n + i) * n + j) * n + k) * n + l] = s;
            }
          }
  }
  return pkg;
}

// -- tangent lift ---------------------------------------------------------------

MetricField tangent_lift(const HessianGeometryPtr& hg) {
  if (hg->topology() != HessianTopology::PeriodicRealTorus)
    throw std::invalid_argument(
        "tangent_lift: full complex grids require a torus base; the orthant "
        "box uses the fiber-reduced route");
  const int n = hg->n_real();
  const int N = hg->resolution();
  std::vector<double> periods(2 * n);
  for (int a = 0; a < n; ++a) {
    periods[2 * a] = hg->periods()[a];      // base x^a
    periods[2 * a + 1] = hg->periods()[a];  // fiber xi^{n+a}
  }
  GeometryPtr geom = GridGeometry::make_torus(n, N, periods);
  MetricField out(geom, n);
  const std::size_t lifted = geom->num_nodes();
  for (std::size_t m = 0; m < lifted; ++m) {
    // base node from the even axes
    std::size_t base = 0, mult = 1, idx = m;
    for (int a = 0; a < 2 * n; ++a) {
      const std::size_t ia = idx % N;
      idx /= N;
      if (a % 2 == 0) {
        base += ia * mult;
        mult *= N;
      }
    }
    auto v = out.at(m);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) v(i, j) = hg->metric().at(base)(i, j);
  }
  return out;
}

namespace {

// Fiber-reduced curvature of the lift: every d/dz on a fiber-constant field
// is (1/2) d/dx, so R^T and its Ricci trace are computed on the base grid.
struct ReducedLift {
  Tensor4Field curvature;  // values indexed by base node
  RealMatrixField ricci_trace;
  double torsion_sup = 0.0;
};

ReducedLift reduced_lift_curvature(const HessianGeometry& hg) {
  const int n = hg.n_real();
  const std::size_t nodes = hg.num_nodes();
  const RealMatrixField& g = hg.metric();

  std::vector<RealMatrixField> dg(n, RealMatrixField(nodes, n));
  std::vector<std::vector<RealMatrixField>> d2g(
      n, std::vector<RealMatrixField>(n, RealMatrixField(nodes, n)));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      ScalarField e(nodes);
      for (std::size_t m = 0; m < nodes; ++m) e[m] = g.at(m)(i, j);
      for (int k = 0; k < n; ++k) {
        ScalarField d = hg.dx(e, k);
        for (std::size_t m = 0; m < nodes; ++m) {
          dg[k].at(m)(i, j) = d[m];
          dg[k].at(m)(j, i) = d[m];
        }
        for (int l = 0; l < n; ++l) {
          ScalarField dd = hg.dxdx(e, k, l);
          for (std::size_t m = 0; m < nodes; ++m) {
            d2g[k][l].at(m)(i, j) = dd[m];
            d2g[k][l].at(m)(j, i) = dd[m];
          }
        }
      }
    }

  ReducedLift out;
  out.curvature.n = n;
  out.curvature.data.assign(nodes * n * n * n * n, cplx(0, 0));
  out.ricci_trace = RealMatrixField(nodes, n);
  double tors = 0.0;
  for (std::size_t m = 0; m < nodes; ++m) {
    Eigen::MatrixXd ginv = n == 1
                               ? Eigen::MatrixXd::Constant(1, 1, 1.0 / g.at(m)(0, 0))
                               : g.at(m).inverse().eval();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            // d_z -> (1/2) d_x on fiber-constant data
            double s = -0.25 * d2g[k][l].at(m)(i, j);
            for (int p = 0; p < n; ++p)
              for (int q = 0; q < n; ++q)
                s += 0.25 * ginv(q, p) * dg[k].at(m)(i, q) * dg[l].at(m)(p, j);
            out.curvature.data[(((m * n + i) * n + j) * n + k) * n + l] = s;
          }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            s += ginv(l, k) *
                 out.curvature.data[(((m * n + i) * n + j) * n + k) * n + l]
                     .real();
        out.ricci_trace.at(m)(i, j) = s;
      }
    // torsion of the lift measures the Hessian symmetry defect
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double gam = 0.0;
          for (int l = 0; l < n; ++l)
            gam += ginv(l, k) * (dg[i].at(m)(j, l) - dg[j].at(m)(i, l));
          tors = std::max(tors, std::abs(0.5 * gam));
        }
  }
  out.torsion_sup = tors;
  return out;
}

}  // namespace

LiftResiduals lift_correspondence_check(const HessianGeometryPtr& hg) {
  if (!hg->has_potential())
    throw std::invalid_argument("lift_correspondence_check: needs a potential");
  HessianPackage pkg = hessian_metric_package(hg);
  const int n = hg->n_real();
  LiftResiduals out;

  if (hg->topology() == HessianTopology::PeriodicRealTorus) {
    MetricField lift = tangent_lift(hg);
    CurvaturePackage cp = curvature_package(lift);
    const GeometryPtr geom = lift.geometry();
    const int N = hg->resolution();
    double worst_rm = 0.0, worst_ric = 0.0;
    for (std::size_t m = 0; m < geom->num_nodes(); ++m) {
      std::size_t base = 0, mult = 1, idx = m;
      for (int a = 0; a < 2 * n; ++a) {
        const std::size_t ia = idx % N;
        idx /= N;
        if (a % 2 == 0) {
          base += ia * mult;
          mult *= N;
        }
      }
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l)
              worst_rm = std::max(
                  worst_rm, std::abs(cp.curvature.at(m, i, j, k, l) +
                                     0.5 * pkg.q_at(base, i, j, k, l)));
          worst_ric = std::max(
              worst_ric, std::abs(cp.ricci.entry(m, i, j) -
                                  0.25 * pkg.koszul.beta.at(base)(i, j)));
        }
    }
    out.curvature = worst_rm;
    out.ricci = worst_ric;
    out.torsion = cp.sup_torsion;
    return out;
  }

  ReducedLift red = reduced_lift_curvature(*hg);
  double worst_rm = 0.0, worst_ric = 0.0;
  for (std::size_t m = 0; m < hg->num_nodes(); ++m)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            worst_rm = std::max(
                worst_rm,
                std::abs(red.curvature
                             .data[(((m * n + i) * n + j) * n + k) * n + l]
                             .real() +
                         0.5 * pkg.q_at(m, i, j, k, l)));
        worst_ric = std::max(worst_ric,
                             std::abs(red.ricci_trace.at(m)(i, j) -
                                      0.25 * pkg.koszul.beta.at(m)(i, j)));
      }
  out.curvature = worst_rm;
  out.ricci = worst_ric;
  out.torsion = red.torsion_sup;
  return out;
}

// -- discretization adapter ------------------------------------------------------

MatrixField embed_real(const RealMatrixField& f) {
  MatrixField out(f.nodes, f.n);
  for (std::size_t m = 0; m < f.nodes; ++m) {
    auto v = out.at(m);
    for (int i = 0; i < f.n; ++i)
      for (int j = 0; j < f.n; ++j) v(i, j) = f.at(m)(i, j);
  }
  return out;
}

class HessianDiscretization final : public Discretization {
public:
  explicit HessianDiscretization(HessianGeometryPtr hg) : hg_(std::move(hg)) {}

  std::size_t nodes() const override { return hg_->num_nodes(); }
  int dim() const override { return hg_->n_real(); }
  bool compact() const override {
    return hg_->topology() == HessianTopology::PeriodicRealTorus;
  }
  bool supports_assembly() const override {
    return hg_->topology() == HessianTopology::LogOrthantBox;
  }

  MatrixField hessian(const ScalarField& u) const override {
    // The lifted equation carries 4 (u o pi)_{jp#} = (D d u) o pi.
    return embed_real(hg_->affine_hessian(u));
  }

  ScalarField apply_linearized(const MatrixField& C, double eps,
                               const ScalarField& v) const override {
    MatrixField H = hessian(v);
    ScalarField out(v.size());
    const int n = dim();
    for (std::size_t m = 0; m < out.size(); ++m) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          acc += (C.entry(m, j, k) * H.entry(m, k, j)).real();
      out[m] = acc - eps * v[m];
    }
    return out;
  }

  ScalarField precondition(double mean_coeff, double eps,
                           const ScalarField& r) const override {
    if (hg_->topology() != HessianTopology::PeriodicRealTorus) return r;
    return tensor_fourier_solve(r, hg_->n_real(), hg_->resolution(),
                                hg_->periods(), mean_coeff, eps);
  }

  Eigen::SparseMatrix<double> assemble(const MatrixField& C,
                                       double eps) const override {
    const int n = dim();
    const std::size_t nodes = hg_->num_nodes();
    const int N = hg_->resolution();
    // One-dimensional affine operators along each axis as sparse matrices:
    // Dx_a = diag(e^{-t_a}) D1_a and the same-axis second derivative
    // Dxx_a = diag(e^{-2 t_a}) (D2_a - D1_a); these mirror dx()/dxdx().
    auto axis_op = [&](int a, bool second) {
      std::vector<Eigen::Triplet<double>> trip;
      std::size_t stride = 1;
      for (int d = 0; d < a; ++d) stride *= static_cast<std::size_t>(N);
      for (std::size_t m = 0; m < nodes; ++m) {
        const int ja = static_cast<int>((m / stride) % N);
        const double t = hg_->chart_coordinate(m, a);
        const double scale = std::exp(second ? -2.0 * t : -t);
        for (int k = 0; k < N; ++k) {
          const double w = second ? hg_->d2_(ja, k) - hg_->d1_(ja, k)
                                  : hg_->d1_(ja, k);
          if (w == 0.0) continue;
          const std::ptrdiff_t col = static_cast<std::ptrdiff_t>(m) +
                                     static_cast<std::ptrdiff_t>(k - ja) *
                                         static_cast<std::ptrdiff_t>(stride);
          trip.emplace_back(static_cast<int>(m), static_cast<int>(col),
                            scale * w);
        }
      }
      Eigen::SparseMatrix<double> M(static_cast<int>(nodes),
                                    static_cast<int>(nodes));
      M.setFromTriplets(trip.begin(), trip.end());
      return M;
    };
    std::vector<Eigen::SparseMatrix<double>> Dx(n);
    for (int a = 0; a < n; ++a) Dx[a] = axis_op(a, false);

    Eigen::SparseMatrix<double> L(static_cast<int>(nodes),
                                  static_cast<int>(nodes));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Eigen::SparseMatrix<double> op =
            (i == j) ? axis_op(i, true) : Eigen::SparseMatrix<double>(Dx[i] * Dx[j]);
        for (int col = 0; col < op.outerSize(); ++col)
          for (Eigen::SparseMatrix<double>::InnerIterator it(op, col); it; ++it)
            it.valueRef() *= C.entry(static_cast<std::size_t>(it.row()), i, j)
                                 .real();
        L += op;
      }
    Eigen::SparseMatrix<double> I(static_cast<int>(nodes),
                                  static_cast<int>(nodes));
    I.setIdentity();
    L -= eps * I;
    return L;
  }

private:
  HessianGeometryPtr hg_;
  friend DiscretizationPtr make_hessian_discretization(const HessianGeometryPtr&);
};

DiscretizationPtr make_hessian_discretization(const HessianGeometryPtr& hg) {
  return std::make_shared<HessianDiscretization>(hg);
}

// -- Hesse-Einstein ---------------------------------------------------------------

ScalarField box_cutoff_factor(const HessianGeometry& hg, double kappa) {
  if (hg.topology() != HessianTopology::LogOrthantBox)
    throw std::invalid_argument("box_cutoff_factor: orthant boxes only");
  CutoffFunction FF(kappa);
  const double center = 0.5 * (hg.t_min() + hg.t_max());
  const int N = hg.resolution();
  // normalize so the outermost chart node sits strictly inside s = 1
  const double half = 0.5 * (hg.t_max() - hg.t_min());
  const double rho0 = half * (1.0 + 1.0 / (2.0 * (N - 1)));
  ScalarField out(hg.num_nodes(), 1.0);
  for (std::size_t m = 0; m < hg.num_nodes(); ++m) {
    double F = 0.0;
    for (int a = 0; a < hg.n_real(); ++a)
      F += FF.value(std::abs(hg.chart_coordinate(m, a) - center) / rho0);
    if (F != 0.0) out[m] = std::exp(2.0 * F);
  }
  return out;
}

bool box_plateau_node(const HessianGeometry& hg, double kappa,
                      std::size_t node) {
  CutoffFunction FF(kappa);
  const double center = 0.5 * (hg.t_min() + hg.t_max());
  const int N = hg.resolution();
  const double half = 0.5 * (hg.t_max() - hg.t_min());
  const double rho0 = half * (1.0 + 1.0 / (2.0 * (N - 1)));
  for (int a = 0; a < hg.n_real(); ++a)
    if (std::abs(hg.chart_coordinate(node, a) - center) / rho0 >=
        FF.plateau_end())
      return false;
  return true;
}

HesseEinsteinResult hesse_einstein_solve(const HessianGeometryPtr& hg,
                                         const SolverConfig& cfg,
                                         double kappa) {
  const int n = hg->n_real();
  const std::size_t nodes = hg->num_nodes();
  KoszulData kd = koszul_forms(*hg, hg->metric());

  RealMatrixField chi(nodes, n);  // -beta(g) = 2 kappa(g)
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  for (std::size_t m = 0; m < nodes; ++m) {
    chi.at(m) = -kd.beta.at(m);
    double lmin;
    if (n == 1) {
      lmin = chi.at(m)(0, 0);
    } else {
      es.compute(chi.at(m), Eigen::EigenvaluesOnly);
      lmin = es.eigenvalues().minCoeff();
    }
    if (!(lmin > 0.0)) {
      std::ostringstream os;
      os << "second Koszul form not positive at node " << m
         << " (min eigenvalue " << lmin << ")";
      throw KappaNotPositive(os.str());
    }
  }

  ScalarField h(nodes);
  for (std::size_t m = 0; m < nodes; ++m) {
    const double dg = n == 1 ? hg->metric().at(m)(0, 0)
                             : hg->metric().at(m).determinant();
    const double dc = n == 1 ? chi.at(m)(0, 0) : chi.at(m).determinant();
    h[m] = std::log(dg) - std::log(dc);
  }

  const bool box = hg->topology() == HessianTopology::LogOrthantBox;
  RealMatrixField background = chi;
  if (box) {
    const ScalarField factor = box_cutoff_factor(*hg, kappa);
    for (std::size_t m = 0; m < nodes; ++m)
      if (factor[m] != 1.0) background.at(m) *= factor[m];
  }

  ProblemSpec p;
  p.disc = make_hessian_discretization(hg);
  p.alpha = embed_real(background);
  p.chi = p.alpha;
  p.h = h;
  p.epsilon = 1.0;
  p.op = make_operator(OperatorKind::LogMA, n);

  SolverConfig scfg = cfg;
  scfg.stage = "hesse-einstein";
  ScalarField zero(nodes, 0.0);
  HesseEinsteinResult out;
  out.report = newton_solve(p, 1.0, zero, scfg);

  // Inner candidate g_hat = -beta(g) + D d u (untruncated extension; equal
  // to the solved object on the plateau region, smooth across the band).
  out.metric = RealMatrixField(nodes, n);
  RealMatrixField ddu = hg->affine_hessian(out.report.solution);
  for (std::size_t m = 0; m < nodes; ++m) out.metric.at(m) = chi.at(m) + ddu.at(m);

  KoszulData hat = koszul_forms(*hg, out.metric);
  double worst = 0.0;
  for (std::size_t m = 0; m < nodes; ++m) {
    if (box && !box_plateau_node(*hg, kappa, m)) continue;
    Eigen::MatrixXd diff = hat.beta.at(m) + out.metric.at(m);
    worst = std::max(worst, diff.cwiseAbs().maxCoeff());
  }
  out.residual = worst;
  return out;
}

}  // namespace hermbench
