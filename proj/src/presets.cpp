#include "xrt/presets.hpp"

#include <cmath>
#include <functional>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace xrt {

namespace {

std::vector<double> parse_params(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

void split_spec(const std::string& spec, std::string& name,
                std::string& params) {
  const auto pos = spec.find(':');
  name = spec.substr(0, pos);
  params = pos == std::string::npos ? "" : spec.substr(pos + 1);
}

// f(x) = a(x) * u (x) ... (x) u from a scalar profile with analytic gradient.
SymmetricTensorField monomial_field(
    int dim, int order, const Vec& polarization, DecaySpec decay,
    std::function<double(const Vec&)> a,
    std::function<Vec(const Vec&)> grad_a) {
  Vec u = polarization;
  if (order > 0) {
    const double n = u.norm();
    if (!(n > 0))
      throw std::invalid_argument("monomial_field: zero polarization");
    u /= n;
  }
  const int nc = tensor_component_count(dim, order);
  auto pol = std::make_shared<Vec>(nc);
  for (int flat = 0; flat < nc; ++flat) {
    double prod = 1.0;
    int rest = flat;
    for (int k = 0; k < order; ++k) {
      prod *= u(rest % dim);
      rest /= dim;
    }
    (*pol)(flat) = prod;
  }
  auto coeff = [a, pol](const Vec& x) -> Vec { return a(x) * (*pol); };
  auto dcoeff = [grad_a, pol](const Vec& x) -> Mat {
    return (*pol) * grad_a(x).transpose();
  };
  return SymmetricTensorField(dim, order, coeff, decay, dcoeff);
}

}  // namespace

WarpedProfile powerlaw_profile(double c, double kappa, double r_max,
                               double step) {
  if (!(c > 0) || !(kappa > 2))
    throw std::invalid_argument("powerlaw_profile: need c > 0, kappa > 2");
  return profile_from_curvature(
      [c, kappa](double r) { return -c * std::pow(1.0 + r, -kappa); }, r_max,
      step);
}

ManifoldModel parse_model(const std::string& spec) {
  std::string name, params;
  split_spec(spec, name, params);
  if (name == "flat" || name == "euclidean") {
    const int n = params.empty() ? 2 : static_cast<int>(parse_params(params)[0]);
    return ManifoldModel::euclidean(n);
  }
  if (name == "constant" || name == "hyperbolic") {
    const auto p = parse_params(params.empty() ? "1" : params);
    const int n = p.size() > 1 ? static_cast<int>(p[1]) : 2;
    return ManifoldModel::hyperbolic(n, p[0]);
  }
  if (name == "powerlaw") {
    const auto p = parse_params(params.empty() ? "1,3" : params);
    if (p.size() != 2)
      throw std::invalid_argument("parse_model: powerlaw needs c,kappa");
    return ManifoldModel::warped(powerlaw_profile(p[0], p[1]));
  }
  throw std::invalid_argument("parse_model: unknown model '" + spec + "'");
}

SymmetricTensorField gaussian_bump(int dim, const Vec& center, double width,
                                   int order, const Vec& polarization,
                                   double eta) {
  if (!(width > 0) || !(eta > 0))
    throw std::invalid_argument("gaussian_bump: need width > 0, eta > 0");
  const double C =
      10.0 * std::exp(eta * center.norm() + 0.5 * eta * eta * width * width);
  const double w2 = width * width;
  const Vec c = center;
  auto a = [c, w2](const Vec& x) {
    return std::exp(-(x - c).squaredNorm() / (2.0 * w2));
  };
  auto grad_a = [a, c, w2](const Vec& x) -> Vec { return -a(x) / w2 * (x - c); };
  return monomial_field(dim, order, polarization,
                        DecaySpec::exponential(eta, C), a, grad_a);
}

SymmetricTensorField smooth_bump(int dim, const Vec& center, double radius,
                                 int order, const Vec& polarization) {
  if (!(radius > 0)) throw std::invalid_argument("smooth_bump: radius > 0");
  const Vec c = center;
  const double R2 = radius * radius;
  auto a = [c, R2](const Vec& x) {
    const double t = (x - c).squaredNorm() / R2;
    return t < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - t)) : 0.0;
  };
  auto grad_a = [a, c, R2](const Vec& x) -> Vec {
    const double t = (x - c).squaredNorm() / R2;
    if (t >= 1.0) return Vec::Zero(x.size());
    const double s = 1.0 - t;
    return a(x) * (-1.0 / (s * s)) * (2.0 / R2) * (x - c);
  };
  return monomial_field(dim, order, polarization,
                        DecaySpec::compact(center.norm() + radius), a, grad_a);
}

SymmetricTensorField radial_power(int dim, double eta, int order,
                                  const Vec& polarization) {
  if (!(eta > 0)) throw std::invalid_argument("radial_power: eta > 0");
  auto a = [eta](const Vec& x) {
    return std::pow(1.0 + x.squaredNorm(), -0.5 * eta);
  };
  auto grad_a = [eta](const Vec& x) -> Vec {
    return -eta * std::pow(1.0 + x.squaredNorm(), -0.5 * eta - 1.0) * x;
  };
  return monomial_field(dim, order, polarization,
                        DecaySpec::polynomial(eta, std::pow(2.0, 0.5 * eta)), a,
                        grad_a);
}

SymmetricTensorField potential_of(const ManifoldModel& M,
                                  const SymmetricTensorField& h) {
  return sym_nabla(M, h);
}

SymmetricTensorField parse_field(const ManifoldModel& M,
                                 const std::string& spec) {
  std::string name, params;
  split_spec(spec, name, params);
  const int dim = M.dim();
  Vec e1 = Vec::Zero(dim);
  e1(0) = 1.0;
  Vec diag = Vec::Ones(dim);
  if (name == "gaussian" || name == "gaussian1") {
    const auto p = parse_params(params.empty() ? "0.5,0.3,0.5" : params);
    if (p.size() != 3)
      throw std::invalid_argument("parse_field: gaussian needs cx,cy,width");
    Vec c = Vec::Zero(dim);
    c(0) = p[0];
    c(1) = p[1];
    const int order = name == "gaussian1" ? 1 : 0;
    return gaussian_bump(dim, c, p[2], order, diag);
  }
  if (name == "bump" || name == "bump1") {
    const auto p = parse_params(params.empty() ? "0,0,1.5" : params);
    if (p.size() != 3)
      throw std::invalid_argument("parse_field: bump needs cx,cy,radius");
    Vec c = Vec::Zero(dim);
    c(0) = p[0];
    c(1) = p[1];
    const int order = name == "bump1" ? 1 : 0;
    return smooth_bump(dim, c, p[2], order, diag);
  }
  if (name == "radial") {
    const auto p = parse_params(params.empty() ? "2" : params);
    return radial_power(dim, p[0], 0, e1);
  }
  if (name == "potential") {
    if (params.empty())
      throw std::invalid_argument("parse_field: potential needs an h preset");
    return potential_of(M, parse_field(M, params));
  }
  throw std::invalid_argument("parse_field: unknown field '" + spec + "'");
}

}  // namespace xrt
