#include "hermbench/fields.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace hermbench {

MatrixField::MatrixField(GeometryPtr geom, int n)
    : geom_(std::move(geom)), n_(n) {
  nodes_ = geom_ ? geom_->num_nodes() : 0;
  data_.assign(nodes_ * n_ * n_, cplx(0, 0));
}

MatrixField::MatrixField(std::size_t nodes, int n) : n_(n), nodes_(nodes) {
  data_.assign(nodes_ * n_ * n_, cplx(0, 0));
}

ComplexField MatrixField::entry_field(int i, int j) const {
  ComplexField f(nodes_);
  for (std::size_t m = 0; m < nodes_; ++m) f[m] = entry(m, i, j);
  return f;
}

void MatrixField::set_entry_field(int i, int j, const ComplexField& f) {
  for (std::size_t m = 0; m < nodes_; ++m) entry(m, i, j) = f[m];
}

void MatrixField::hermitize() {
  for (std::size_t m = 0; m < nodes_; ++m) {
    auto a = at(m);
    Eigen::MatrixXcd h = 0.5 * (a + a.adjoint().eval());
    a = h;
  }
}

double MatrixField::hermitian_defect() const {
  double worst = 0.0;
  for (std::size_t m = 0; m < nodes_; ++m) {
    const auto a = at(m);
    worst = std::max(worst, (a - a.adjoint()).cwiseAbs().maxCoeff());
  }
  return worst;
}

double MatrixField::min_eigenvalue() const {
  double worst = std::numeric_limits<double>::max();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es;
  for (std::size_t m = 0; m < nodes_; ++m) {
    if (n_ == 1) {
      worst = std::min(worst, entry(m, 0, 0).real());
    } else {
      es.compute(at(m), Eigen::EigenvaluesOnly);
      worst = std::min(worst, es.eigenvalues().minCoeff());
    }
  }
  return worst;
}

double MatrixField::max_eigenvalue() const {
  double best = std::numeric_limits<double>::lowest();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es;
  for (std::size_t m = 0; m < nodes_; ++m) {
    if (n_ == 1) {
      best = std::max(best, entry(m, 0, 0).real());
    } else {
      es.compute(at(m), Eigen::EigenvaluesOnly);
      best = std::max(best, es.eigenvalues().maxCoeff());
    }
  }
  return best;
}

MatrixField& MatrixField::operator+=(const MatrixField& o) {
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

MatrixField& MatrixField::operator-=(const MatrixField& o) {
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

MatrixField& MatrixField::operator*=(double s) {
  for (auto& v : data_) v *= s;
  return *this;
}

MatrixField MatrixField::identity(GeometryPtr geom, int n) {
  MatrixField f(std::move(geom), n);
  for (std::size_t m = 0; m < f.nodes_; ++m)
    for (int i = 0; i < n; ++i) f.entry(m, i, i) = 1.0;
  return f;
}

MatrixField MatrixField::scaled(const MatrixField& base,
                                const ScalarField& factor) {
  MatrixField out = base;
  for (std::size_t m = 0; m < out.nodes_; ++m) {
    auto a = out.at(m);
    a *= factor[m];
  }
  return out;
}

void check_metric(const MatrixField& m) {
  check_form(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es;
  for (std::size_t k = 0; k < m.nodes(); ++k) {
    double lmin;
    if (m.n() == 1) {
      lmin = m.entry(k, 0, 0).real();
    } else {
      es.compute(m.at(k), Eigen::EigenvaluesOnly);
      lmin = es.eigenvalues().minCoeff();
    }
    if (!(lmin > 0.0)) {
      std::ostringstream os;
      os << "metric not positive definite at node " << k
         << " (min eigenvalue " << lmin << ")";
      throw std::invalid_argument(os.str());
    }
  }
}

void check_form(const MatrixField& m) {
  for (std::size_t k = 0; k < m.nodes(); ++k) {
    const auto a = m.at(k);
    const double defect = (a - a.adjoint()).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if (!(defect <= 1e-12 * scale)) {
      std::ostringstream os;
      os << "field not Hermitian at node " << k << " (defect " << defect
         << ")";
      throw std::invalid_argument(os.str());
    }
    for (const auto& v : std::initializer_list<cplx>{a(0, 0)})
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw std::invalid_argument("field has non-finite values");
  }
}

std::pair<double, double> pencil_bounds(const MatrixField& a,
                                        const MatrixField& b) {
  double lo = std::numeric_limits<double>::max();
  double hi = std::numeric_limits<double>::lowest();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es;
  for (std::size_t m = 0; m < a.nodes(); ++m) {
    if (a.n() == 1) {
      const double lam = a.entry(m, 0, 0).real() / b.entry(m, 0, 0).real();
      lo = std::min(lo, lam);
      hi = std::max(hi, lam);
    } else {
      es.compute(a.at(m), b.at(m), Eigen::EigenvaluesOnly);
      lo = std::min(lo, es.eigenvalues().minCoeff());
      hi = std::max(hi, es.eigenvalues().maxCoeff());
    }
  }
  return {lo, hi};
}

std::vector<double> volume_weights(const MatrixField& g) {
  if (!g.geometry())
    throw std::logic_error("volume_weights: field has no geometry attached");
  std::vector<double> w = g.geometry()->cell_volumes();
  for (std::size_t m = 0; m < g.nodes(); ++m) {
    const double det = g.n() == 1 ? g.entry(m, 0, 0).real()
                                  : g.at(m).determinant().real();
    w[m] *= det;
  }
  return w;
}

}  // namespace hermbench
