#include "hermbench/cutoff.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace hermbench {

namespace {

// 20-point Gauss-Legendre nodes/weights on [-1, 1]; the transition band
// integrand is smooth, so a fixed rule reaches machine accuracy.
constexpr int kGaussN = 20;
constexpr std::array<double, kGaussN> kGaussX = {
    -0.9931285991850949, -0.9639719272779138, -0.9122344282513259,
    -0.8391169718222188, -0.7463319064601508, -0.6360536807265150,
    -0.5108670019508271, -0.3737060887154196, -0.2277858511416451,
    -0.0765265211334973, 0.0765265211334973,  0.2277858511416451,
    0.3737060887154196,  0.5108670019508271,  0.6360536807265150,
    0.7463319064601508,  0.8391169718222188,  0.9122344282513259,
    0.9639719272779138,  0.9931285991850949};
constexpr std::array<double, kGaussN> kGaussW = {
    0.0176140071391521, 0.0406014298003869, 0.0626720483341091,
    0.0832767415767048, 0.1019301198172404, 0.1181945319615184,
    0.1316886384491766, 0.1420961093183821, 0.1491729864726037,
    0.1527533871307258, 0.1527533871307258, 0.1491729864726037,
    0.1420961093183821, 0.1316886384491766, 0.1181945319615184,
    0.1019301198172404, 0.0832767415767048, 0.0626720483341091,
    0.0406014298003869, 0.0176140071391521};

}  // namespace

CutoffFunction::CutoffFunction(double kappa) : kappa_(kappa) {
  if (!(kappa > 0.0 && kappa < 0.125))
    throw std::invalid_argument("CutoffFunction: kappa must lie in (0, 1/8)");
  a_ = 1.0 - kappa_ + kappa_ * kappa_;
  b_ = 1.0 - kappa_ + 2.0 * kappa_ * kappa_;
  f_at_b_ = f(b_);
}

double CutoffFunction::f(double s) const {
  if (s <= 1.0 - kappa_) return 0.0;
  if (s >= 1.0)
    throw std::domain_error("CutoffFunction: profile only defined on [0, 1)");
  const double w = (s - 1.0 + kappa_) / kappa_;
  return -std::log1p(-w * w);
}

double CutoffFunction::f_deriv(int k, double s) const {
  if (s <= 1.0 - kappa_) return 0.0;
  const double w = (s - 1.0 + kappa_) / kappa_;
  const double d = 1.0 - w * w;
  switch (k) {
    case 1:
      return 2.0 * w / (kappa_ * d);
    case 2:
      return 2.0 * (1.0 + w * w) / (kappa_ * kappa_ * d * d);
    case 3:
      return 4.0 * w * (3.0 + w * w) / (kappa_ * kappa_ * kappa_ * d * d * d);
    default:
      throw std::invalid_argument("f_deriv: k must be 1..3");
  }
}

double CutoffFunction::psi(double s) const {
  if (s <= a_) return 0.0;
  if (s >= b_) return 1.0;
  const double w = (s - a_) / (kappa_ * kappa_);
  return w * w * w * (10.0 + w * (-15.0 + 6.0 * w));
}

double CutoffFunction::psi_deriv(int k, double s) const {
  if (s <= a_ || s >= b_) return 0.0;
  const double k2 = kappa_ * kappa_;
  const double w = (s - a_) / k2;
  if (k == 1) {
    const double d = w * (1.0 - w);
    return 30.0 * d * d / k2;
  }
  if (k == 2) return (60.0 * w - 180.0 * w * w + 120.0 * w * w * w) / (k2 * k2);
  throw std::invalid_argument("psi_deriv: k must be 1..2");
}

double CutoffFunction::value(double s) const {
  if (s <= a_) return 0.0;  // exact zero on the plateau
  double acc = 0.0;
  const double hi = std::min(s, b_);
  // transition band [a, min(s, b)]
  const double mid = 0.5 * (a_ + hi), half = 0.5 * (hi - a_);
  for (int i = 0; i < kGaussN; ++i) {
    const double tau = mid + half * kGaussX[i];
    acc += half * kGaussW[i] * psi(tau) * f_deriv(1, tau);
  }
  if (s > b_) acc += f(s) - f_at_b_;  // psi == 1 beyond the band
  return acc;
}

double CutoffFunction::derivative(int k, double s) const {
  switch (k) {
    case 1:
      return psi(s) * f_deriv(1, s);
    case 2:
      return psi_deriv(1, s) * f_deriv(1, s) + psi(s) * f_deriv(2, s);
    case 3:
      return psi_deriv(2, s) * f_deriv(1, s) +
             2.0 * psi_deriv(1, s) * f_deriv(2, s) + psi(s) * f_deriv(3, s);
    default:
      throw std::invalid_argument("derivative: k must be 1..3");
  }
}

ScalarField conformal_factor(const GeometryPtr& geom, double rho0,
                             double kappa) {
  if (geom->topology() != Topology::TruncatedRadial)
    throw std::invalid_argument(
        "conformal_factor: geometry must be TruncatedRadial");
  if (!(rho0 > 0.0))
    throw std::invalid_argument("conformal_factor: rho0 must be positive");
  CutoffFunction FF(kappa);
  ScalarField out(geom->num_nodes());
  for (std::size_t m = 0; m < out.size(); ++m) {
    const double F = FF.value(geom->radial_s()[m] / rho0);
    out[m] = F == 0.0 ? 1.0 : std::exp(2.0 * F);
  }
  return out;
}

MetricField conformal_truncation(const MetricField& metric, double rho0,
                                 double kappa) {
  ScalarField factor = conformal_factor(metric.geometry(), rho0, kappa);
  MetricField out = metric;
  for (std::size_t m = 0; m < out.nodes(); ++m) {
    if (factor[m] == 1.0) continue;  // bit-exact below the transition
    auto a = out.at(m);
    a *= factor[m];
  }
  return out;
}

}  // namespace hermbench
