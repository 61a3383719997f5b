#pragma once

#include <string>

#include "xrt/tensor.hpp"

namespace xrt {

// Named model presets accepted by the CLI and shared with the tests:
//   flat | euclidean[:n]      Euclidean R^n (default n = 2)
//   constant:K0 | hyperbolic:K0[,n]   constant curvature -K0
//   powerlaw:c,kappa          warped 2-D model with K(r) = -c (1+r)^(-kappa)
ManifoldModel parse_model(const std::string& spec);

// Warped profile for K(r) = -c (1+r)^(-kappa); kappa > 2 keeps the
// integral of s|K(s)| finite (the P_kappa regime).
WarpedProfile powerlaw_profile(double c, double kappa, double r_max = 120.0,
                               double step = 0.01);

// a(x) u (x) ... (x) u with a a Gaussian of the given width around center
// and u the (normalized) polarization. Carries the E_eta decay bound
// |f|_g <= C e^{-eta d} with C = 10 e^{eta |center| + eta^2 width^2 / 2}
// (the factor 10 covers the polynomial growth of derivatives under
// sym_nabla, which keeps the decay spec). Analytic component Jacobian.
SymmetricTensorField gaussian_bump(int dim, const Vec& center, double width,
                                   int order, const Vec& polarization,
                                   double eta = 2.0);

// C-infinity bump exp(1 - 1/(1 - |x-c|^2/R^2)) on |x-c| < R, zero outside;
// exact compact support radius |center| + R. Analytic Jacobian.
SymmetricTensorField smooth_bump(int dim, const Vec& center, double radius,
                                 int order, const Vec& polarization);

// (1 + |x|^2)^(-eta/2) times the polarization monomial; in P_eta with
// C = 2^(eta/2). Analytic Jacobian.
SymmetricTensorField radial_power(int dim, double eta, int order,
                                  const Vec& polarization);

// sigma nabla of a preset potential (exactness relies on the analytic
// Jacobian the presets carry).
SymmetricTensorField potential_of(const ManifoldModel& M,
                                  const SymmetricTensorField& h);

// Field presets accepted by the CLI:
//   gaussian[:cx,cy,width]        order-0 Gaussian bump
//   gaussian1[:cx,cy,width]       order-1, polarization (1, 1)/sqrt(2)
//   bump[:cx,cy,radius]           compactly supported order-0 bump
//   bump1[:cx,cy,radius]          order-1 variant
//   radial:eta                    radial_power, order 0
//   potential:<h-preset>          sigma nabla of the named potential
SymmetricTensorField parse_field(const ManifoldModel& M,
                                 const std::string& spec);

}  // namespace xrt
