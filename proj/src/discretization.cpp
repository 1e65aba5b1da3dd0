#include "hermbench/discretization.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hermbench/chern.hpp"

namespace hermbench {

ScalarField Discretization::precondition(double, double,
                                         const ScalarField& r) const {
  return r;
}

Eigen::SparseMatrix<double> Discretization::assemble(const MatrixField&,
                                                     double) const {
  throw std::logic_error("assemble: not supported by this discretization");
}

namespace {

class TorusDiscretization final : public Discretization {
public:
  explicit TorusDiscretization(GeometryPtr geom) : geom_(std::move(geom)) {}

  std::size_t nodes() const override { return geom_->num_nodes(); }
  int dim() const override { return geom_->n_complex(); }
  bool compact() const override { return true; }

  MatrixField hessian(const ScalarField& u) const override {
    return complex_hessian(geom_, u);
  }

  ScalarField apply_linearized(const MatrixField& C, double eps,
                               const ScalarField& v) const override {
    MatrixField H = complex_hessian(geom_, v);
    ScalarField out(v.size());
    const int n = dim();
    for (std::size_t m = 0; m < out.size(); ++m) {
      cplx acc = 0;
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) acc += C.entry(m, j, k) * H.entry(m, k, j);
      out[m] = acc.real() - eps * v[m];
    }
    return out;
  }

  ScalarField precondition(double mean_coeff, double eps,
                           const ScalarField& r) const override {
    return fourier_poisson(*geom_, r, 0.25 * mean_coeff, eps);
  }

private:
  GeometryPtr geom_;
};

class RadialDiscretization final : public Discretization {
public:
  explicit RadialDiscretization(GeometryPtr geom) : geom_(std::move(geom)) {}

  std::size_t nodes() const override { return geom_->num_nodes(); }
  int dim() const override { return 1; }
  bool compact() const override { return false; }
  bool supports_assembly() const override { return true; }

  MatrixField hessian(const ScalarField& u) const override {
    return complex_hessian(geom_, u);
  }

  ScalarField apply_linearized(const MatrixField& C, double eps,
                               const ScalarField& v) const override {
    MatrixField H = complex_hessian(geom_, v);
    ScalarField out(v.size());
    for (std::size_t m = 0; m < out.size(); ++m)
      out[m] = (C.entry(m, 0, 0) * H.entry(m, 0, 0)).real() - eps * v[m];
    return out;
  }

  Eigen::SparseMatrix<double> assemble(const MatrixField& C,
                                       double eps) const override {
    const int N = geom_->resolution();
    const auto& D1 = geom_->radial_d1();
    const auto& D2 = geom_->radial_d2();
    const auto& rp = geom_->radial_drds();
    const auto& rpp = geom_->radial_d2rds2();
    const auto& r = geom_->radial_r();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(N) * 8);
    for (int j = 0; j < N; ++j) {
      const double c = C.entry(j, 0, 0).real();
      const double a = rp[j];
      const double w2 = 0.25 * c / (a * a);
      const double w1 = 0.25 * c * (-rpp[j] / (a * a * a) + 1.0 / (a * r[j]));
      for (int k = 0; k < N; ++k) {
        const double val = w2 * D2(j, k) + w1 * D1(j, k);
        if (val != 0.0) trip.emplace_back(j, k, val);
      }
      trip.emplace_back(j, j, -eps);
    }
    Eigen::SparseMatrix<double> A(N, N);
    A.setFromTriplets(trip.begin(), trip.end());
    return A;
  }

private:
  GeometryPtr geom_;
};

}  // namespace

DiscretizationPtr make_discretization(const GeometryPtr& geom) {
  if (geom->topology() == Topology::PeriodicTorus)
    return std::make_shared<TorusDiscretization>(geom);
  return std::make_shared<RadialDiscretization>(geom);
}

}  // namespace hermbench
