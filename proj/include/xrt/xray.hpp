#pragma once

#include "xrt/tensor.hpp"

namespace xrt {

struct TransformSample {
  SMPoint seed;
  double value = 0.0;
  double tail_bound = 0.0;  // truncation error estimate from the decay class
  double horizon = 0.0;     // T actually used per ray direction
};

struct XrayOptions {
  double tol = 1e-8;
  double step = 1e-2;      // quadrature/ODE step (Simpson on the RK4 grid)
  double max_horizon = 200.0;
};

// One-sided primitive u^f(x, v) = int_0^infty lambda(f)(phi_t(x, v)) dt.
// The horizon is chosen so that the decay-class tail bound (with the
// distance lower bounds along the ray) is below tol/2.
TransformSample uf(const ManifoldModel& M, const SymmetricTensorField& f,
                   const SMPoint& p, const XrayOptions& opt = {});

// Full transform I_m f(x, v) = u^f(x, v) + (-1)^m u^f(x, -v).
TransformSample xray_transform(const ManifoldModel& M,
                               const SymmetricTensorField& f, const SMPoint& p,
                               const XrayOptions& opt = {});

// |(u^f(phi_h p) - u^f(phi_-h p)) / 2h + lambda(f)(p)|; the transport
// equation X u^f = -f tested by central flow differences.
double transport_residual(const ManifoldModel& M, const SymmetricTensorField& f,
                          const SMPoint& p, double h_fd,
                          const XrayOptions& opt = {});

// max |I_m(sigma nabla h)| over a set of geodesic seeds.
double kernel_probe(const ManifoldModel& M, const SymmetricTensorField& h,
                    const std::vector<SMPoint>& seeds,
                    const XrayOptions& opt = {});

struct GradientSymmetryReport {
  double horizontal_defect = 0.0;  // |D_h u(x,-v) - (-1)^{m-1} D_h u(x,v)|
  double vertical_defect = 0.0;    // |D_v u(x,-v) - (-1)^m   D_v u(x,v)|
};

// Parity of the horizontal/vertical derivatives of u^f under v -> -v when
// If = 0 (certified inputs only, e.g. f = sigma nabla h). Derivatives are
// realized by the parallel-transport flow and the fiber rotation flow.
// Dimension 2 only (w = v_perp).
GradientSymmetryReport gradient_symmetry_check(const ManifoldModel& M,
                                               const SymmetricTensorField& f,
                                               const SMPoint& p, double h_fd,
                                               const XrayOptions& opt = {});

// Forward time after which a geodesic from p cannot meet the (metric) ball
// of the given radius around o again, padded by one quadrature step. Shared
// by the transform horizon logic and the discretized forward operator.
double support_exit_time(const ManifoldModel& M, const SMPoint& p,
                         double radius, double step);

// Rotation of v by +pi/2 in the oriented chart (unit g-norm preserved only
// on 2-D rotationally symmetric models; see implementation).
Vec v_perp(const ManifoldModel& M, const Vec& x, const Vec& v);

}  // namespace xrt
