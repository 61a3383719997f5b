#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "xrt/tensor.hpp"

namespace xrt {

// Discretization of the 2-D circle bundle SM = M x S^1. The fiber is
// parametrized by the angle alpha against a smooth orthonormal frame
// (F1, F2): v(alpha) = cos(alpha) F1 + sin(alpha) F2, so vertical Fourier
// modes are ordinary Fourier modes in alpha.

struct SpatialGrid {
  double x0 = 0.0, y0 = 0.0;  // lower-left node
  double hx = 0.0, hy = 0.0;
  int nx = 0, ny = 0;

  static SpatialGrid centered(double half_extent, int n) {
    const double h = 2.0 * half_extent / (n - 1);
    return {-half_extent, -half_extent, h, h, n, n};
  }
  int nodes() const { return nx * ny; }
  int index(int ix, int iy) const { return ix + nx * iy; }
  Vec node(int ix, int iy) const {
    Vec x(2);
    x << x0 + ix * hx, y0 + iy * hy;
    return x;
  }
};

// Orthonormal frame at a point: F1 = d1 / sqrt(g11), F2 by Gram-Schmidt.
// w1 = omega(F1), w2 = omega(F2) with the connection form omega defined by
// nabla_w F1 = omega(w) F2; along the geodesic flow alpha' = -omega(v).
struct FrameData {
  Vec F1, F2;
  double w1 = 0.0, w2 = 0.0;
  double sqrt_det_g = 1.0;
};

FrameData frame_at(const ManifoldModel& M, const Vec& x);

class SMGridFunction {
 public:
  SMGridFunction(SpatialGrid grid, int ntheta, double support_radius);

  const SpatialGrid& grid() const { return grid_; }
  int ntheta() const { return ntheta_; }
  double support_radius() const { return support_radius_; }
  double theta(int j) const { return 2.0 * kPi * j / ntheta_; }

  double operator()(int node, int j) const { return values_(node, j); }
  double& at(int node, int j) { return values_(node, j); }
  const Mat& values() const { return values_; }
  Mat& values() { return values_; }

 private:
  SpatialGrid grid_;
  int ntheta_;
  double support_radius_;
  Mat values_;  // nodes x ntheta
};

struct FourierModes {
  SpatialGrid grid;
  int kmax = 0;
  double support_radius = 0.0;
  Eigen::MatrixXcd coeff;  // nodes x (2 kmax + 1); column kmax + k holds u_k
  double aliased_fraction = 0.0;  // angular energy above kmax / total

  int col(int k) const { return kmax + k; }
};

using SMFunction = std::function<double(const Vec& x, const Vec& v)>;

// Samplers. sample_tensor evaluates lambda(f)(x, v(alpha)) on unit vectors,
// so an order-m field occupies modes |k| <= m exactly.
SMGridFunction sample_sm(const ManifoldModel& M, const SpatialGrid& grid,
                         int ntheta, const SMFunction& fn,
                         double support_radius);
SMGridFunction sample_tensor(const ManifoldModel& M, const SpatialGrid& grid,
                             int ntheta, const SymmetricTensorField& f,
                             double support_radius);

// Direct DFT per spatial node. Requires ntheta >= 2 kmax + 2.
FourierModes vertical_fourier(const SMGridFunction& u, int kmax);
SMGridFunction synthesize(const FourierModes& m, int ntheta);
// Modes +-k only (a real field when the input was real).
FourierModes mode_select(const FourierModes& m, int k);

// L^2(SM) with the Sasaki volume sqrt(det g) dx dtheta.
double sm_inner(const ManifoldModel& M, const SMGridFunction& u,
                const SMGridFunction& w);
double sm_norm(const ManifoldModel& M, const SMGridFunction& u);
double modes_norm(const ManifoldModel& M, const FourierModes& m);

// Spectral vertical operators (exact on the angular band).
SMGridFunction vertical_derivative(const SMGridFunction& u);   // V = d/dalpha
SMGridFunction vertical_laplacian(const SMGridFunction& u);    // -d^2/dalpha^2

// Semi-analytic horizontal operators on the grid: with
// P = F1 . du - w1 du/dalpha and Q = F2 . du - w2 du/dalpha,
//   X u      = cos(alpha) P + sin(alpha) Q,
//   X_perp u = sin(alpha) P - cos(alpha) Q
// (orientation: the horizontal gradient is -(X_perp u) v_perp with
// v_perp the +pi/2 rotation of v). Spatial derivatives use 4th-order central
// stencils with zero extension, hence compact support must stay >= 3 stencils
// inside the box.
SMGridFunction apply_X_grid(const ManifoldModel& M, const SMGridFunction& u);
SMGridFunction apply_Xperp_grid(const ManifoldModel& M, const SMGridFunction& u);

// Flow-difference counterparts with step delta (O(delta^2) in the flows, for
// cross-checking the semi-analytic operators): X by the geodesic flow, X_perp
// by the parallel-transport flow in direction v_perp, V by fiber rotation.
struct FlowDerivatives {
  SMGridFunction Xu, Xperp_u, Vu;
};
FlowDerivatives apply_flows(const ManifoldModel& M, const SMFunction& fn,
                            const SpatialGrid& grid, int ntheta, double delta,
                            double support_radius);

// X restricted to the mode pair +-k of u, split by target mode:
// X u_k = X_plus u_k (modes +-(k+1)) + X_minus u_k (modes +-(k-1)).
struct SplitModes {
  FourierModes plus, minus;
  double leakage = 0.0;  // relative energy of X u_k outside modes k +- 1
};
SplitModes split_Xpm(const ManifoldModel& M, const FourierModes& u, int k);

struct ContractionRatio {
  int k = 0;
  double nplus = 0.0, nminus = 0.0;
  double ratio = 0.0;
  bool skipped = false;  // ||X_plus u_k|| below the vacuous-case floor
};
std::vector<ContractionRatio> contraction_check(const ManifoldModel& M,
                                                const FourierModes& u,
                                                int kmax);

// slack = (||Xu||^2 + ||X_perp u||^2) - (||X_plus u||^2 + ||X_minus u||^2).
double norm_splitting_check(const ManifoldModel& M, const FourierModes& u);

// || X_plus u_k + X_minus u_{k+2} ||, the per-mode transport recursion.
double recursion_defect(const ManifoldModel& M, const FourierModes& u, int k);

}  // namespace xrt
