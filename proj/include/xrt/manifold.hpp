#pragma once

#include <memory>
#include <optional>

#include "xrt/types.hpp"
#include "xrt/warp.hpp"

namespace xrt {

// Cartan-Hadamard manifold model in a single global chart (normal
// coordinates about the base point o = 0, where exp_o is a diffeomorphism).
// All models are rotationally symmetric with radial warp f(r):
//
//   g_ij(x) = u_i u_j + (f(r)/r)^2 (delta_ij - u_i u_j),  r = |x|, u = x/r,
//
// with f(r) = r (Euclidean), sinh(sqrt(K0) r)/sqrt(K0) (hyperbolic), or a
// prescribed WarpedProfile (dimension 2 only). Immutable after construction;
// every evaluator is pure and thread-safe.
class ManifoldModel {
 public:
  enum class Kind { Euclidean, Hyperbolic, Warped };

  static ManifoldModel euclidean(int n);
  static ManifoldModel hyperbolic(int n, double K0);
  static ManifoldModel warped(WarpedProfile profile);

  int dim() const { return dim_; }
  Kind kind() const { return kind_; }
  Vec base_point() const { return Vec::Zero(dim_); }
  double hyperbolic_K0() const { return K0_; }
  const WarpedProfile* profile() const { return profile_.get(); }

  // Warp function and its first two derivatives at radius r.
  WarpEval warp(double r) const;

  Mat metric(const Vec& x) const;
  Mat metric_inverse(const Vec& x) const;
  double inner(const Vec& x, const Vec& u, const Vec& v) const;
  double norm(const Vec& x, const Vec& v) const;

  // Gamma^k_{ij} as n matrices (one per upper index k).
  std::vector<Mat> christoffel(const Vec& x) const;
  // Contraction Gamma(x)(u, v)^k; the hot path of the geodesic integrator.
  Vec christoffel_uv(const Vec& x, const Vec& u, const Vec& v) const;

  // R(u,v)v with index raised (vector field value).
  Vec curvature_operator(const Vec& x, const Vec& u, const Vec& v) const;
  double sectional_curvature(const Vec& x, const Vec& u, const Vec& v) const;

  // Sectional curvature of planes containing the radial direction (k_rad)
  // and of purely tangential planes (k_tan), as functions of the radius.
  void radial_curvatures(double r, double& k_rad, double& k_tan) const;

  // K(x) = sup over two-planes of |K_x(Pi)|.
  double kappa_bound(const Vec& x) const;
  double kappa_bound_radius(double r) const;
  // sup_x K(x); the K0 entering the comparison estimates.
  double sup_kappa() const;

  // Volume of the geodesic sphere S(o, r). The v-type normal Jacobi fields
  // along radial geodesics have norm f(r), so the Jacobi determinant reduces
  // to f(r)^(n-1); in 2-D this is the circumference 2*pi*f(r).
  double sphere_volume(double r) const;

 private:
  ManifoldModel(int n, Kind kind);

  struct RadialCoeffs {
    double A;   // (f/r)^2
    double dA;  // d/dr (f/r)^2
    double q1;  // A'/(2A)
    double q2;  // (1-A)/r - A'/2
  };
  RadialCoeffs coeffs(double r) const;

  int dim_;
  Kind kind_;
  double K0_ = 0.0;  // hyperbolic curvature magnitude
  std::shared_ptr<const WarpedProfile> profile_;
};

ManifoldModel make_euclidean(int n);
ManifoldModel make_hyperbolic(int n, double K0);
ManifoldModel make_warped(WarpedProfile profile);

double sphere_volume(const ManifoldModel& M, double r);

}  // namespace xrt
