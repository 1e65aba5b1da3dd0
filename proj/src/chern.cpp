#include "hermbench/chern.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace hermbench {

Tensor3Field::Tensor3Field(GeometryPtr g, int dim)
    : geom(std::move(g)), n(dim),
      data(geom->num_nodes() * dim * dim * dim, cplx(0, 0)) {}

cplx& Tensor3Field::at(std::size_t node, int a, int b, int c) {
  return data[((node * n + a) * n + b) * n + c];
}
const cplx& Tensor3Field::at(std::size_t node, int a, int b, int c) const {
  return data[((node * n + a) * n + b) * n + c];
}

Tensor4Field::Tensor4Field(GeometryPtr g, int dim)
    : geom(std::move(g)), n(dim),
      data(geom->num_nodes() * dim * dim * dim * dim, cplx(0, 0)) {}

cplx& Tensor4Field::at(std::size_t node, int a, int b, int c, int d) {
  return data[(((node * n + a) * n + b) * n + c) * n + d];
}
const cplx& Tensor4Field::at(std::size_t node, int a, int b, int c,
                             int d) const {
  return data[(((node * n + a) * n + b) * n + c) * n + d];
}

Form11Field complex_hessian(const GeometryPtr& geom, const ScalarField& u) {
  for (double v : u)
    if (!std::isfinite(v))
      throw std::invalid_argument("complex_hessian: non-finite input");
  const int n = geom->n_complex();
  Form11Field out(geom, n);
  ComplexField uc = to_complex(u);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (j < i) continue;  // fill upper triangle, mirror below
      ComplexField d = deriv_z_zbar(*geom, uc, i, j);
      out.set_entry_field(i, j, d);
    }
  for (std::size_t m = 0; m < out.nodes(); ++m)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j)
        out.entry(m, i, j) = std::conj(out.entry(m, j, i));
  out.hermitize();
  return out;
}

namespace {

struct MetricDerivatives {
  // dg[k](i,j)   = d_{z^k} g_{ij#}
  // dgb[l](i,j)  = d_{zbar^l} g_{ij#}
  // d2g[k][l](i,j) = d_{z^k} d_{zbar^l} g_{ij#}
  std::vector<MatrixField> dg, dgb;
  std::vector<std::vector<MatrixField>> d2g;
};

MetricDerivatives metric_derivatives(const MetricField& g) {
  const auto geom = g.geometry();
  const int n = g.n();
  MetricDerivatives out;
  out.dg.assign(n, MatrixField(geom, n));
  out.dgb.assign(n, MatrixField(geom, n));
  out.d2g.assign(n, std::vector<MatrixField>(n, MatrixField(geom, n)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      ComplexField e = g.entry_field(i, j);
      for (int k = 0; k < n; ++k) {
        out.dg[k].set_entry_field(i, j, deriv_z(*geom, e, k));
        out.dgb[k].set_entry_field(i, j, deriv_zbar(*geom, e, k));
        for (int l = 0; l < n; ++l)
          out.d2g[k][l].set_entry_field(i, j, deriv_z_zbar(*geom, e, k, l));
      }
    }
  return out;
}

Eigen::MatrixXcd inverse_at(const MatrixField& g, std::size_t m) {
  if (g.n() == 1) {
    Eigen::MatrixXcd inv(1, 1);
    inv(0, 0) = 1.0 / g.entry(m, 0, 0);
    return inv;
  }
  return g.at(m).inverse();
}

}  // namespace

CurvaturePackage curvature_package(const MetricField& g) {
  const auto geom = g.geometry();
  const int n = g.n();
  const std::size_t nodes = g.nodes();

  CurvaturePackage pkg;
  pkg.christoffel = Tensor3Field(geom, n);
  pkg.torsion = Tensor3Field(geom, n);
  pkg.curvature = Tensor4Field(geom, n);
  pkg.ricci = Form11Field(geom, n);
  pkg.ricci_trace = Form11Field(geom, n);

  const MetricDerivatives d = metric_derivatives(g);

  // log det g is real for Hermitian g; its complex Hessian gives the
  // Chern-Ricci form.
  ScalarField logdet(nodes);
  for (std::size_t m = 0; m < nodes; ++m) {
    const double det =
        n == 1 ? g.entry(m, 0, 0).real() : g.at(m).determinant().real();
    if (!(det > 0.0))
      throw std::invalid_argument("curvature_package: singular metric matrix");
    logdet[m] = std::log(det);
  }
  Form11Field ric = complex_hessian(geom, logdet);
  ric *= -1.0;
  ric.hermitize();
  pkg.ricci = ric;

  // Pointwise tensors. Index convention: G(i,j) = g_{ij#}, inverse metric
  // g^{il#} = G^{-1}(l,i).
  std::vector<Eigen::MatrixXcd> ginv(nodes);
  for (std::size_t m = 0; m < nodes; ++m) {
    ginv[m] = inverse_at(g, m);
    // Gamma^i_{jk} = g^{il#} d_{z^j} g_{kl#}
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          cplx s = 0;
          for (int l = 0; l < n; ++l)
            s += ginv[m](l, i) * d.dg[j].entry(m, k, l);
          pkg.christoffel.at(m, i, j, k) = s;
        }
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          pkg.torsion.at(m, k, i, j) = pkg.christoffel.at(m, k, i, j) -
                                       pkg.christoffel.at(m, k, j, i);
    // R_{ij#kl#} = -d_k d_l# g_{ij#} + g^{pq#} (d_k g_{iq#})(d_l# g_{pj#})
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            cplx s = -d.d2g[k][l].entry(m, i, j);
            for (int p = 0; p < n; ++p)
              for (int q = 0; q < n; ++q)
                s += ginv[m](q, p) * d.dg[k].entry(m, i, q) *
                     d.dgb[l].entry(m, p, j);
            pkg.curvature.at(m, i, j, k, l) = s;
          }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        cplx s = 0;
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            s += ginv[m](l, k) * pkg.curvature.at(m, i, j, k, l);
        pkg.ricci_trace.entry(m, i, j) = s;
      }
  }
  pkg.ricci_trace.hermitize();

  // Covariant derivative of the torsion: nabla_m T^k_{ij} and the
  // antiholomorphic part nabla_m# T^k_{ij} = d_{zbar^m} T^k_{ij}.
  std::vector<Tensor3Field> dT(n, Tensor3Field(geom, n));
  std::vector<Tensor3Field> dTb(n, Tensor3Field(geom, n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        ComplexField e(nodes);
        for (std::size_t m = 0; m < nodes; ++m)
          e[m] = pkg.torsion.at(m, k, i, j);
        for (int mdir = 0; mdir < n; ++mdir) {
          ComplexField dz = deriv_z(*geom, e, mdir);
          ComplexField dzb = deriv_zbar(*geom, e, mdir);
          for (std::size_t m = 0; m < nodes; ++m) {
            dT[mdir].at(m, k, i, j) = dz[m];
            dTb[mdir].at(m, k, i, j) = dzb[m];
          }
        }
      }

  double sup_t = 0.0, sup_nt = 0.0, sup_rm = 0.0, sup_ric = 0.0;
  for (std::size_t m = 0; m < nodes; ++m) {
    const auto G = g.at(m);
    const auto& gi = ginv[m];
    auto up = [&](int a, int b) { return gi(b, a); };  // g^{ab#}

    double t2 = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q)
              for (int s = 0; s < n; ++s)
                t2 += std::real(up(i, p) * up(j, q) * G(k, s) *
                                pkg.torsion.at(m, k, i, j) *
                                std::conj(pkg.torsion.at(m, s, p, q)));
    sup_t = std::max(sup_t, std::sqrt(std::max(0.0, t2)));

    double nt2 = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        // holomorphic part with connection terms
        auto covT = [&](int mdir, int k, int i, int j) {
          cplx v = dT[mdir].at(m, k, i, j);
          for (int p = 0; p < n; ++p) {
            v += pkg.christoffel.at(m, k, mdir, p) * pkg.torsion.at(m, p, i, j);
            v -= pkg.christoffel.at(m, p, mdir, i) * pkg.torsion.at(m, k, p, j);
            v -= pkg.christoffel.at(m, p, mdir, j) * pkg.torsion.at(m, k, i, p);
          }
          return v;
        };
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
              for (int p = 0; p < n; ++p)
                for (int q = 0; q < n; ++q)
                  for (int s = 0; s < n; ++s) {
                    nt2 += std::real(up(a, b) * up(i, p) * up(j, q) * G(k, s) *
                                     covT(a, k, i, j) *
                                     std::conj(covT(b, s, p, q)));
                    nt2 += std::real(up(b, a) * up(i, p) * up(j, q) * G(k, s) *
                                     dTb[a].at(m, k, i, j) *
                                     std::conj(dTb[b].at(m, s, p, q)));
                  }
      }
    sup_nt = std::max(sup_nt, std::sqrt(std::max(0.0, nt2)));

    double rm2 = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            for (int p = 0; p < n; ++p)
              for (int q = 0; q < n; ++q)
                for (int r = 0; r < n; ++r)
                  for (int s = 0; s < n; ++s)
                    rm2 += std::real(
                        up(i, p) * up(q, j) * up(k, r) * up(s, l) *
                        pkg.curvature.at(m, i, j, k, l) *
                        std::conj(pkg.curvature.at(m, p, q, r, s)));
    sup_rm = std::max(sup_rm, std::sqrt(std::max(0.0, rm2)));

    double ric2 = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int p = 0; p < n; ++p)
          for (int q = 0; q < n; ++q)
            ric2 += std::real(up(i, p) * up(q, j) * pkg.ricci.entry(m, i, j) *
                              std::conj(pkg.ricci.entry(m, p, q)));
    sup_ric = std::max(sup_ric, std::sqrt(std::max(0.0, ric2)));
  }
  pkg.sup_torsion = sup_t;
  pkg.sup_nabla_torsion = sup_nt;
  pkg.sup_curvature = sup_rm;
  pkg.sup_ricci = sup_ric;
  return pkg;
}

std::pair<double, double> gauduchon_residuals(const MetricField& g) {
  check_metric(g);
  const int n = g.n();
  // A (2,2)-form vanishes identically on a curve, a (3,3)-form on a surface.
  if (n == 1) return {0.0, 0.0};
  const auto geom = g.geometry();
  // dd# omega has the single component (n = 2)
  //   d1 d1# g_{22#} + d2 d2# g_{11#} - d1 d2# g_{21#} - d2 d1# g_{12#}.
  ComplexField c(g.nodes(), cplx(0, 0));
  auto add = [&](int k, int l, int i, int j, double sign) {
    ComplexField e = g.entry_field(i, j);
    ComplexField d = deriv_z_zbar(*geom, e, k, l);
    for (std::size_t m = 0; m < c.size(); ++m) c[m] += sign * d[m];
  };
  add(0, 0, 1, 1, 1.0);
  add(1, 1, 0, 0, 1.0);
  add(0, 1, 1, 0, -1.0);
  add(1, 0, 0, 1, -1.0);
  return {sup_abs(c), 0.0};
}

double einstein_residual(const MetricField& g, double lambda) {
  CurvaturePackage pkg = curvature_package(g);
  double worst = 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es;
  for (std::size_t m = 0; m < g.nodes(); ++m) {
    Eigen::MatrixXcd diff = pkg.ricci.at(m) - lambda * g.at(m);
    if (g.n() == 1) {
      worst = std::max(worst, std::abs(diff(0, 0).real()));
    } else {
      es.compute(diff, Eigen::EigenvaluesOnly);
      worst = std::max(worst, es.eigenvalues().cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

double measured_curvature_unit(const GeometryPtr& geom) {
  const std::size_t nodes = geom->num_nodes();
  if (geom->topology() == Topology::PeriodicTorus) {
    // Conformal probe with geometric spectrum: eta = a sum_k q^k cos(k x),
    // Ric_{11#} = (a/4) sum_k k^2 q^k cos(k x) in closed form.
    const double a = 0.2, q = 0.5;
    const int kmax = 120;
    const int n = geom->n_complex();
    ScalarField eta(nodes, 0.0);
    ScalarField ric_exact(nodes, 0.0);
    for (std::size_t m = 0; m < nodes; ++m) {
      const double x = geom->coordinate(m, 0);
      double e = 0.0, rc = 0.0, qq = q;
      for (int k = 1; k <= kmax; ++k) {
        e += a * qq * std::cos(k * x);
        rc += 0.25 * a * k * k * qq * std::cos(k * x);
        qq *= q;
      }
      eta[m] = e;
      ric_exact[m] = rc;
    }
    MetricField g = MetricField::identity(geom, n);
    for (std::size_t m = 0; m < nodes; ++m) g.entry(m, 0, 0) = std::exp(eta[m]);
    CurvaturePackage pkg = curvature_package(g);
    double err = 0.0;
    for (std::size_t m = 0; m < nodes; ++m)
      err = std::max(err,
                     std::abs(pkg.ricci.entry(m, 0, 0).real() - ric_exact[m]));
    return err;
  }
  if (geom->radial_model() == RadialModel::HyperbolicDisk) {
    // The hyperbolic model itself: Ric(g) = -g exactly.
    MetricField g(geom, 1);
    for (std::size_t m = 0; m < nodes; ++m) {
      const double r = geom->radial_r()[m];
      const double d = 1.0 - r * r;
      g.entry(m, 0, 0) = 2.0 / (d * d);
    }
    return einstein_residual(g, -1.0);
  }
  // Euclidean disk: conformal bump with closed-form Ricci.
  MetricField g(geom, 1);
  ScalarField ric_exact(nodes);
  const double a = 0.3;
  for (std::size_t m = 0; m < nodes; ++m) {
    const double r = geom->radial_r()[m];
    const double eta = a * std::exp(-r * r);
    g.entry(m, 0, 0) = std::exp(eta);
    // Ric = -(1/4) (eta'' + eta'/r),  eta' = -2 a r e^{-r^2}.
    ric_exact[m] = -0.25 * a * std::exp(-r * r) * (4.0 * r * r - 4.0);
  }
  CurvaturePackage pkg = curvature_package(g);
  double err = 0.0;
  for (std::size_t m = 0; m < nodes; ++m)
    err = std::max(err,
                   std::abs(pkg.ricci.entry(m, 0, 0).real() - ric_exact[m]));
  return err;
}

}  // namespace hermbench
