#include "xrt/manifold.hpp"

#include <cmath>
#include <stdexcept>

namespace xrt {

namespace {
// Radius below which radial quantities switch to their r -> 0 series.
constexpr double kSeriesRadius = 1e-6;
}  // namespace

ManifoldModel::ManifoldModel(int n, Kind kind) : dim_(n), kind_(kind) {}

ManifoldModel ManifoldModel::euclidean(int n) {
  if (n < 2) throw std::invalid_argument("euclidean: dimension must be >= 2");
  return ManifoldModel(n, Kind::Euclidean);
}

ManifoldModel ManifoldModel::hyperbolic(int n, double K0) {
  if (n < 2) throw std::invalid_argument("hyperbolic: dimension must be >= 2");
  if (!(K0 > 0)) throw std::invalid_argument("hyperbolic: K0 must be positive");
  ManifoldModel m(n, Kind::Hyperbolic);
  m.K0_ = K0;
  return m;
}

ManifoldModel ManifoldModel::warped(WarpedProfile profile) {
  ManifoldModel m(2, Kind::Warped);
  m.profile_ = std::make_shared<const WarpedProfile>(std::move(profile));
  return m;
}

ManifoldModel make_euclidean(int n) { return ManifoldModel::euclidean(n); }
ManifoldModel make_hyperbolic(int n, double K0) {
  return ManifoldModel::hyperbolic(n, K0);
}
ManifoldModel make_warped(WarpedProfile profile) {
  return ManifoldModel::warped(std::move(profile));
}

WarpEval ManifoldModel::warp(double r) const {
  switch (kind_) {
    case Kind::Euclidean:
      return {r, 1.0, 0.0};
    case Kind::Hyperbolic: {
      const double s = std::sqrt(K0_);
      return {std::sinh(s * r) / s, std::cosh(s * r), s * std::sinh(s * r)};
    }
    case Kind::Warped:
      return profile_->eval(r);
  }
  return {};
}

void ManifoldModel::radial_curvatures(double r, double& k_rad, double& k_tan) const {
  switch (kind_) {
    case Kind::Euclidean:
      k_rad = k_tan = 0.0;
      return;
    case Kind::Hyperbolic:
      k_rad = k_tan = -K0_;
      return;
    case Kind::Warped:
      // Dimension 2: a single plane, so both coefficients coincide with the
      // Gaussian curvature -f''/f.
      k_rad = k_tan = profile_->curvature(r);
      return;
  }
}

ManifoldModel::RadialCoeffs ManifoldModel::coeffs(double r) const {
  if (kind_ == Kind::Euclidean) return {1.0, 0.0, 0.0, 0.0};
  double k0;
  if (kind_ == Kind::Hyperbolic) {
    k0 = -K0_;
  } else {
    k0 = profile_->curvature_at_zero();
  }
  if (r < kSeriesRadius) {
    const double A = 1.0 - k0 * r * r / 3.0;
    const double dA = -2.0 * k0 * r / 3.0;
    return {A, dA, -k0 * r / 3.0, 2.0 * k0 * r / 3.0};
  }
  const WarpEval w = warp(r);
  const double c = w.f / r;
  const double dc = (w.df * r - w.f) / (r * r);
  const double A = c * c;
  const double dA = 2.0 * c * dc;
  const double q1 = dc / c;
  const double q2 = (1.0 - A) / r - dA / 2.0;
  return {A, dA, q1, q2};
}

Mat ManifoldModel::metric(const Vec& x) const {
  const int n = dim_;
  const double r = x.norm();
  const RadialCoeffs rc = coeffs(r);
  if (r < kSeriesRadius) return rc.A * Mat::Identity(n, n);
  const Vec u = x / r;
  return rc.A * Mat::Identity(n, n) + (1.0 - rc.A) * (u * u.transpose());
}

Mat ManifoldModel::metric_inverse(const Vec& x) const {
  const int n = dim_;
  const double r = x.norm();
  const RadialCoeffs rc = coeffs(r);
  if (r < kSeriesRadius) return Mat::Identity(n, n) / rc.A;
  const Vec u = x / r;
  return Mat::Identity(n, n) / rc.A + (1.0 - 1.0 / rc.A) * (u * u.transpose());
}

double ManifoldModel::inner(const Vec& x, const Vec& u, const Vec& v) const {
  const double r = x.norm();
  const RadialCoeffs rc = coeffs(r);
  if (r < kSeriesRadius) return rc.A * u.dot(v);
  const Vec e = x / r;
  const double ur = u.dot(e), vr = v.dot(e);
  return ur * vr + rc.A * (u.dot(v) - ur * vr);
}

double ManifoldModel::norm(const Vec& x, const Vec& v) const {
  return std::sqrt(std::max(0.0, inner(x, v, v)));
}

std::vector<Mat> ManifoldModel::christoffel(const Vec& x) const {
  const int n = dim_;
  const double r = x.norm();
  std::vector<Mat> G(n, Mat::Zero(n, n));
  if (kind_ == Kind::Euclidean || r == 0.0) return G;
  const RadialCoeffs rc = coeffs(r);
  const Vec u = x / r;
  const Mat P = Mat::Identity(n, n) - u * u.transpose();
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        G[k](i, j) = rc.q1 * (u(i) * P(k, j) + u(j) * P(k, i)) +
                     rc.q2 * P(i, j) * u(k);
  return G;
}

Vec ManifoldModel::christoffel_uv(const Vec& x, const Vec& u, const Vec& v) const {
  const int n = dim_;
  const double r = x.norm();
  if (kind_ == Kind::Euclidean || r == 0.0) return Vec::Zero(n);
  const RadialCoeffs rc = coeffs(r);
  const Vec e = x / r;
  const double ue = u.dot(e), ve = v.dot(e);
  const Vec Pu = u - ue * e, Pv = v - ve * e;
  return rc.q1 * (ue * Pv + ve * Pu) + rc.q2 * (u.dot(Pv)) * e;
}

Vec ManifoldModel::curvature_operator(const Vec& x, const Vec& u, const Vec& v) const {
  const double r = x.norm();
  double k_rad = 0.0, k_tan = 0.0;
  radial_curvatures(r, k_rad, k_tan);
  const double gvv = inner(x, v, v), guv = inner(x, u, v);
  Vec out = k_tan * (gvv * u - guv * v);
  if (r >= kSeriesRadius && k_rad != k_tan) {
    const Vec e = x / r;  // unit radial, |e|_g = 1
    const double ru = inner(x, u, e), rv = inner(x, v, e);
    out += (k_rad - k_tan) *
           (rv * rv * u - guv * rv * e + gvv * ru * e - ru * rv * v);
  }
  return out;
}

double ManifoldModel::sectional_curvature(const Vec& x, const Vec& u, const Vec& v) const {
  const double guu = inner(x, u, u), gvv = inner(x, v, v), guv = inner(x, u, v);
  const double area2 = guu * gvv - guv * guv;
  if (area2 <= 1e-14)
    throw std::invalid_argument("sectional_curvature: degenerate plane");
  return inner(x, curvature_operator(x, u, v), u) / area2;
}

double ManifoldModel::kappa_bound_radius(double r) const {
  double k_rad = 0.0, k_tan = 0.0;
  radial_curvatures(r, k_rad, k_tan);
  return std::max(std::abs(k_rad), std::abs(k_tan));
}

double ManifoldModel::kappa_bound(const Vec& x) const {
  return kappa_bound_radius(x.norm());
}

double ManifoldModel::sup_kappa() const {
  switch (kind_) {
    case Kind::Euclidean:
      return 0.0;
    case Kind::Hyperbolic:
      return K0_;
    case Kind::Warped: {
      double sup = std::abs(profile_->curvature_at_zero());
      const auto& f = profile_->f_samples();
      const auto& ddf = profile_->ddf_samples();
      for (std::size_t i = 1; i < f.size(); ++i)
        sup = std::max(sup, std::abs(ddf[i] / f[i]));
      return sup;
    }
  }
  return 0.0;
}

double ManifoldModel::sphere_volume(double r) const {
  if (r < 0) throw std::invalid_argument("sphere_volume: negative radius");
  if (r == 0.0) return 0.0;
  const double f = warp(r).f;
  const int n = dim_;
  const double unit_sphere =
      2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
  return unit_sphere * std::pow(f, n - 1);
}

double sphere_volume(const ManifoldModel& M, double r) {
  return M.sphere_volume(r);
}

}  // namespace xrt
