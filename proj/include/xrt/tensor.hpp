#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "xrt/geodesic.hpp"
#include "xrt/manifold.hpp"

namespace xrt {

struct DecaySpec {
  enum class Kind { None, Exponential, Polynomial, Compact };
  Kind kind = Kind::None;
  double eta = 0.0;   // decay rate (E_eta / P_eta)
  double C = 1.0;     // bound constant |f| <= C e^{-eta d} resp. C (1+d)^{-eta}
  double support_radius = 0.0;  // Compact only

  static DecaySpec none() { return {}; }
  static DecaySpec exponential(double eta, double C) {
    return {Kind::Exponential, eta, C, 0.0};
  }
  static DecaySpec polynomial(double eta, double C) {
    return {Kind::Polynomial, eta, C, 0.0};
  }
  static DecaySpec compact(double radius) {
    return {Kind::Compact, 0.0, 0.0, radius};
  }
};

// Symmetric covariant m-tensor field given by chart components. Components
// are stored dense as n^m values indexed by i_1 + i_2 n + ... (they must be
// symmetric under index permutation; symmetrize() produces such fields).
// Evaluation is pure; fields are immutable after construction.
class SymmetricTensorField {
 public:
  using CoeffFn = std::function<Vec(const Vec&)>;
  // Optional chart Jacobian of the components: (n^m) x n matrix d coeff / dx.
  using DCoeffFn = std::function<Mat(const Vec&)>;

  SymmetricTensorField(int dim, int order, CoeffFn coeff,
                       DecaySpec decay = DecaySpec::none(),
                       DCoeffFn dcoeff = nullptr);

  int dim() const { return dim_; }
  int order() const { return order_; }
  const DecaySpec& decay() const { return decay_; }
  bool has_analytic_jacobian() const { return static_cast<bool>(dcoeff_); }

  Vec components(const Vec& x) const { return coeff_(x); }
  Mat component_jacobian(const Vec& x, double fd_step) const;

  // max over component index pairs related by a transposition of
  // |f_I - f_{swap(I)}|.
  double asymmetry(const Vec& x) const;

 private:
  int dim_;
  int order_;
  CoeffFn coeff_;
  DCoeffFn dcoeff_;
  DecaySpec decay_;
};

// Multi-index helpers for dense n^m component storage.
int tensor_component_count(int dim, int order);
std::vector<int> unflatten_index(int flat, int dim, int order);
int flatten_index(const std::vector<int>& idx, int dim);

// lambda_x(f)(v) = f_x(v, ..., v).
double lambda_eval(const SymmetricTensorField& f, const Vec& x, const Vec& v);
double lambda_eval_components(const Vec& comps, int dim, int order, const Vec& v);

// Symmetrization over the permutation group of the m slots.
Vec symmetrize_components(const Vec& comps, int dim, int order);
SymmetricTensorField symmetrize(const SymmetricTensorField& T);

// Symmetrized total covariant derivative; raises the order by one. Uses the
// analytic component Jacobian when the field carries one, otherwise central
// differences with the given step.
SymmetricTensorField sym_nabla(const ManifoldModel& M,
                               const SymmetricTensorField& h,
                               double fd_step = 1e-5);

// alpha F = sigma(F (x) g); lambda(alpha F) = lambda(F) on SM.
SymmetricTensorField raise_degree(const ManifoldModel& M,
                                  const SymmetricTensorField& F);

// Pointwise g-norm |f(x)|_g of the tensor.
double tensor_norm(const ManifoldModel& M, const SymmetricTensorField& f,
                   const Vec& x);

struct DecayCheckResult {
  bool passed;
  double fitted_constant;  // sup over samples of the weighted norm
};

// Samples sup_{directions} of the weighted tensor norm at the given radii
// (weight e^{eta r} for E_eta, (1+r)^eta for P_eta). Fails if the weighted
// norm still grows monotonically across the last decade of radii.
DecayCheckResult decay_check(const ManifoldModel& M,
                             const SymmetricTensorField& f,
                             DecaySpec::Kind kind, double eta,
                             const std::vector<double>& radii,
                             int directions = 8);

}  // namespace xrt
