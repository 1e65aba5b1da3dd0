#include "hermbench/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

namespace hermbench {

// Fornberg weights for the m-th derivative at x0 from the nodes x.
Eigen::VectorXd fd_weights(double x0, const Eigen::VectorXd& x, int m) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, m + 1);
  double c1 = 1.0;
  double c4 = x[0] - x0;
  c(0, 0) = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c(i, k) = c1 * (k * c(i - 1, k - 1) - c5 * c(i - 1, k)) / c2;
        c(i, 0) = -c1 * c5 * c(i - 1, 0) / c2;
      }
      for (int k = mn; k >= 1; --k)
        c(j, k) = (c4 * c(j, k) - k * c(j, k - 1)) / c3;
      c(j, 0) = c4 * c(j, 0) / c3;
    }
    c1 = c2;
  }
  return c.col(m);
}

GeometryPtr GridGeometry::make_torus(int n_complex, int resolution,
                                     const std::vector<double>& periods) {
  if (n_complex != 1 && n_complex != 2)
    throw std::invalid_argument("make_torus: complex dimension must be 1 or 2");
  if (resolution < 8 || resolution % 2 != 0)
    throw std::invalid_argument(
        "make_torus: resolution must be even and at least 8");
  const int dims = 2 * n_complex;
  if (static_cast<int>(periods.size()) != dims)
    throw std::invalid_argument("make_torus: expected one period per real direction");
  for (double L : periods)
    if (!(L > 0.0)) throw std::invalid_argument("make_torus: periods must be positive");

  auto g = std::shared_ptr<GridGeometry>(new GridGeometry());
  g->topology_ = Topology::PeriodicTorus;
  g->n_complex_ = n_complex;
  g->resolution_ = resolution;
  g->periods_ = periods;
  std::size_t n = 1;
  for (int d = 0; d < dims; ++d) n *= static_cast<std::size_t>(resolution);
  g->num_nodes_ = n;
  return g;
}

GeometryPtr GridGeometry::make_radial(RadialModel model, int resolution,
                                      double truncation_radius) {
  if (resolution < 8 || resolution % 2 != 0)
    throw std::invalid_argument(
        "make_radial: resolution must be even and at least 8");
  if (!(truncation_radius > 0.0))
    throw std::invalid_argument("make_radial: truncation radius must be positive");

  auto g = std::shared_ptr<GridGeometry>(new GridGeometry());
  g->topology_ = Topology::TruncatedRadial;
  g->n_complex_ = 1;
  g->resolution_ = resolution;
  g->radial_model_ = model;
  g->truncation_radius_ = truncation_radius;
  g->num_nodes_ = static_cast<std::size_t>(resolution);

  const int N = resolution;
  const double h = truncation_radius / N;
  g->s_.resize(N);
  g->r_.resize(N);
  g->rp_.resize(N);
  g->rpp_.resize(N);
  for (int j = 0; j < N; ++j) {
    const double s = (j + 0.5) * h;  // strictly inside (0, rho0)
    g->s_[j] = s;
    switch (model) {
      case RadialModel::EuclideanDisk:
        g->r_[j] = s;
        g->rp_[j] = 1.0;
        g->rpp_[j] = 0.0;
        break;
      case RadialModel::HyperbolicDisk: {
        const double r = std::tanh(0.5 * s);
        g->r_[j] = r;
        g->rp_[j] = 0.5 * (1.0 - r * r);
        g->rpp_[j] = -r * g->rp_[j];
        break;
      }
    }
  }

  // Fourth-order differentiation in s. Radial profiles extend evenly across
  // the origin (regularity g'(0) = 0), so the first rows fold the centered
  // stencil back; the truncation end uses one-sided rows.
  g->d1_ = Eigen::MatrixXd::Zero(N, N);
  g->d2_ = Eigen::MatrixXd::Zero(N, N);
  auto fold = [&](int idx) { return idx >= 0 ? idx : -1 - idx; };
  const double c1[5] = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
  const double c2[5] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
  for (int j = 0; j < N - 2; ++j) {
    for (int o = -2; o <= 2; ++o) {
      const int idx = fold(j + o);
      g->d1_(j, idx) += c1[o + 2] / h;
      g->d2_(j, idx) += c2[o + 2] / (h * h);
    }
  }
  for (int j = N - 2; j < N; ++j) {
    const int w = 6;
    Eigen::VectorXd xs(w);
    for (int k = 0; k < w; ++k) xs[k] = g->s_[N - w + k];
    const Eigen::VectorXd w1 = fd_weights(g->s_[j], xs, 1);
    const Eigen::VectorXd w2 = fd_weights(g->s_[j], xs, 2);
    for (int k = 0; k < w; ++k) {
      g->d1_(j, N - w + k) = w1[k];
      g->d2_(j, N - w + k) = w2[k];
    }
  }
  return g;
}

int GridGeometry::real_dims() const {
  return topology_ == Topology::PeriodicTorus ? 2 * n_complex_ : 1;
}

double GridGeometry::spacing(int axis) const {
  if (topology_ == Topology::PeriodicTorus)
    return periods_.at(axis) / resolution_;
  return truncation_radius_ / resolution_;
}

double GridGeometry::min_spacing() const {
  if (topology_ == Topology::PeriodicTorus) {
    double m = spacing(0);
    for (int d = 1; d < real_dims(); ++d) m = std::min(m, spacing(d));
    return m;
  }
  // smallest Euclidean spacing along the radial chart
  double m = std::numeric_limits<double>::max();
  const double h = truncation_radius_ / resolution_;
  for (std::size_t j = 0; j < rp_.size(); ++j) m = std::min(m, rp_[j] * h);
  return m;
}

std::size_t GridGeometry::axis_index(std::size_t node, int axis) const {
  std::size_t n = node;
  for (int d = 0; d < axis; ++d) n /= resolution_;
  return n % resolution_;
}

double GridGeometry::coordinate(std::size_t node, int axis) const {
  if (topology_ == Topology::PeriodicTorus)
    return static_cast<double>(axis_index(node, axis)) * spacing(axis);
  return axis == 0 ? r_[node] : 0.0;
}

std::vector<double> GridGeometry::cell_volumes() const {
  std::vector<double> v(num_nodes_);
  if (topology_ == Topology::PeriodicTorus) {
    double cell = 1.0;
    for (int d = 0; d < real_dims(); ++d) cell *= spacing(d);
    std::fill(v.begin(), v.end(), cell);
  } else {
    const double h = truncation_radius_ / resolution_;
    for (std::size_t j = 0; j < num_nodes_; ++j)
      v[j] = 2.0 * std::numbers::pi * r_[j] * rp_[j] * h;
  }
  return v;
}

bool GridGeometry::same_layout(const GridGeometry& o) const {
  return topology_ == o.topology_ && n_complex_ == o.n_complex_ &&
         resolution_ == o.resolution_ && periods_ == o.periods_ &&
         radial_model_ == o.radial_model_ &&
         truncation_radius_ == o.truncation_radius_;
}

// --- differentiation ---------------------------------------------------------

std::vector<cplx> spectral_symbol(int N, double L, int order) {
  std::vector<cplx> sym(N);
  for (int m = 0; m < N; ++m) {
    int ms = m <= N / 2 ? m : m - N;
    const double k = 2.0 * std::numbers::pi * ms / L;
    if (order == 1) {
      sym[m] = (m == N / 2) ? cplx(0, 0) : cplx(0, k);
    } else {
      sym[m] = cplx(-k * k, 0);
    }
  }
  return sym;
}

void tensor_axis_symbol(ComplexField& f, int num_axes, int N, int axis,
                        const std::vector<cplx>& symbol) {
  (void)num_axes;
  std::size_t stride = 1;
  for (int d = 0; d < axis; ++d) stride *= static_cast<std::size_t>(N);
  const std::size_t block = stride * static_cast<std::size_t>(N);
  Eigen::FFT<double> fft;
  std::vector<cplx> line(N), hat(N);
  for (std::size_t base = 0; base < f.size(); base += block) {
    for (std::size_t off = 0; off < stride; ++off) {
      for (int m = 0; m < N; ++m) line[m] = f[base + off + stride * m];
      fft.fwd(hat, line);
      for (int m = 0; m < N; ++m) hat[m] *= symbol[m];
      fft.inv(line, hat);
      for (int m = 0; m < N; ++m) f[base + off + stride * m] = line[m];
    }
  }
}

void tensor_axis_matrix(ComplexField& f, int num_axes, int N, int axis,
                        const Eigen::MatrixXd& M) {
  (void)num_axes;
  std::size_t stride = 1;
  for (int d = 0; d < axis; ++d) stride *= static_cast<std::size_t>(N);
  const std::size_t block = stride * static_cast<std::size_t>(N);
  Eigen::VectorXcd line(N);
  for (std::size_t base = 0; base < f.size(); base += block) {
    for (std::size_t off = 0; off < stride; ++off) {
      for (int m = 0; m < N; ++m) line[m] = f[base + off + stride * m];
      Eigen::VectorXcd out = M * line;
      for (int m = 0; m < N; ++m) f[base + off + stride * m] = out[m];
    }
  }
}

ScalarField tensor_fourier_solve(const ScalarField& rhs, int num_axes, int N,
                                 const std::vector<double>& periods, double c,
                                 double eps) {
  ComplexField f = to_complex(rhs);
  std::vector<std::vector<double>> k2(num_axes);
  for (int d = 0; d < num_axes; ++d) {
    k2[d].resize(N);
    for (int m = 0; m < N; ++m) {
      int ms = m <= N / 2 ? m : m - N;
      const double k = 2.0 * std::numbers::pi * ms / periods[d];
      k2[d][m] = k * k;
    }
  }
  Eigen::FFT<double> fft;
  std::vector<cplx> line(N), hat(N);
  for (int d = 0; d < num_axes; ++d) {
    std::size_t stride = 1;
    for (int a = 0; a < d; ++a) stride *= static_cast<std::size_t>(N);
    const std::size_t block = stride * static_cast<std::size_t>(N);
    for (std::size_t base = 0; base < f.size(); base += block)
      for (std::size_t off = 0; off < stride; ++off) {
        for (int m = 0; m < N; ++m) line[m] = f[base + off + stride * m];
        fft.fwd(hat, line);
        for (int m = 0; m < N; ++m) f[base + off + stride * m] = hat[m];
      }
  }
  for (std::size_t node = 0; node < f.size(); ++node) {
    double ksq = 0.0;
    std::size_t n = node;
    for (int d = 0; d < num_axes; ++d) {
      ksq += k2[d][n % N];
      n /= N;
    }
    const double denom = -c * ksq - eps;
    if (ksq == 0.0 && eps == 0.0)
      f[node] = 0.0;  // zero-mean subspace
    else
      f[node] /= denom;
  }
  for (int d = 0; d < num_axes; ++d) {
    std::size_t stride = 1;
    for (int a = 0; a < d; ++a) stride *= static_cast<std::size_t>(N);
    const std::size_t block = stride * static_cast<std::size_t>(N);
    for (std::size_t base = 0; base < f.size(); base += block)
      for (std::size_t off = 0; off < stride; ++off) {
        for (int m = 0; m < N; ++m) hat[m] = f[base + off + stride * m];
        fft.inv(line, hat);
        for (int m = 0; m < N; ++m) f[base + off + stride * m] = line[m];
      }
  }
  return real_part(f);
}

namespace {

ComplexField radial_matvec(const Eigen::MatrixXd& M, const ComplexField& f) {
  Eigen::Map<const Eigen::VectorXcd> v(f.data(), f.size());
  Eigen::VectorXcd out = M * v;
  return {out.data(), out.data() + out.size()};
}

}  // namespace

ComplexField deriv_axis(const GridGeometry& g, const ComplexField& f, int axis,
                        int order) {
  if (g.topology() != Topology::PeriodicTorus)
    throw std::logic_error("deriv_axis: torus geometries only");
  ComplexField out = f;
  tensor_axis_symbol(out, g.real_dims(), g.resolution(), axis,
                     spectral_symbol(g.resolution(), g.periods().at(axis), order));
  return out;
}

ComplexField deriv_z(const GridGeometry& g, const ComplexField& f, int k) {
  if (g.topology() == Topology::TruncatedRadial) {
    // theta = 0 representative of a radial profile: d/dz = (1/2) d/dr.
    ComplexField fs = radial_matvec(g.radial_d1(), f);
    for (std::size_t j = 0; j < fs.size(); ++j)
      fs[j] *= 0.5 / g.radial_drds()[j];
    return fs;
  }
  ComplexField dx = deriv_axis(g, f, 2 * k, 1);
  ComplexField dy = deriv_axis(g, f, 2 * k + 1, 1);
  for (std::size_t i = 0; i < dx.size(); ++i)
    dx[i] = 0.5 * (dx[i] - cplx(0, 1) * dy[i]);
  return dx;
}

ComplexField deriv_zbar(const GridGeometry& g, const ComplexField& f, int k) {
  if (g.topology() == Topology::TruncatedRadial) {
    ComplexField fs = radial_matvec(g.radial_d1(), f);
    for (std::size_t j = 0; j < fs.size(); ++j)
      fs[j] *= 0.5 / g.radial_drds()[j];
    return fs;
  }
  ComplexField dx = deriv_axis(g, f, 2 * k, 1);
  ComplexField dy = deriv_axis(g, f, 2 * k + 1, 1);
  for (std::size_t i = 0; i < dx.size(); ++i)
    dx[i] = 0.5 * (dx[i] + cplx(0, 1) * dy[i]);
  return dx;
}

ComplexField deriv_z_zbar(const GridGeometry& g, const ComplexField& f, int i,
                          int j) {
  if (g.topology() == Topology::TruncatedRadial) {
    // (1/4)(f_rr + f_r / r) on the radial profile.
    const auto& rp = g.radial_drds();
    const auto& rpp = g.radial_d2rds2();
    const auto& r = g.radial_r();
    ComplexField fs = radial_matvec(g.radial_d1(), f);
    ComplexField fss = radial_matvec(g.radial_d2(), f);
    ComplexField out(f.size());
    for (std::size_t m = 0; m < f.size(); ++m) {
      const double a = rp[m];
      const cplx frr = fss[m] / (a * a) - fs[m] * rpp[m] / (a * a * a);
      const cplx fr = fs[m] / a;
      out[m] = 0.25 * (frr + fr / r[m]);
    }
    return out;
  }
  if (i == j) {
    ComplexField dxx = deriv_axis(g, f, 2 * i, 2);
    ComplexField dyy = deriv_axis(g, f, 2 * i + 1, 2);
    for (std::size_t m = 0; m < dxx.size(); ++m)
      dxx[m] = 0.25 * (dxx[m] + dyy[m]);
    return dxx;
  }
  return deriv_z(g, deriv_zbar(g, f, j), i);
}

ScalarField fourier_poisson(const GridGeometry& g, const ScalarField& rhs,
                            double c, double eps) {
  if (g.topology() != Topology::PeriodicTorus)
    throw std::logic_error("fourier_poisson: torus geometries only");
  return tensor_fourier_solve(rhs, g.real_dims(), g.resolution(), g.periods(),
                              c, eps);
}

ComplexField to_complex(const ScalarField& f) {
  ComplexField out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i];
  return out;
}

ScalarField real_part(const ComplexField& f) {
  ScalarField out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i].real();
  return out;
}

double sup_abs(const ScalarField& f) {
  double m = 0.0;
  for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

double sup_abs(const ComplexField& f) {
  double m = 0.0;
  for (const cplx& v : f) m = std::max(m, std::abs(v));
  return m;
}

double mean(const std::vector<double>& w, const ScalarField& f) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    num += w[i] * f[i];
    den += w[i];
  }
  return num / den;
}

}  // namespace hermbench
