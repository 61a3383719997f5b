#pragma once

#include "xrt/geodesic.hpp"

namespace xrt {

// Parallel orthonormal frame of normal vectors along a geodesic, obtained by
// integrating the transport equation on the same RK4 grid as the base path.
struct ParallelFrame {
  GeodesicPath path;
  // frames[i] is n x (n-1): columns are the normal frame vectors at sample i.
  std::vector<Mat> frames;

  std::size_t size() const { return path.size(); }
  // max over samples of |Gram - I| and |<E_i, gamma'>|.
  double orthonormality_defect() const;
};

ParallelFrame parallel_frame(const ManifoldModel& M, const SMPoint& p, double T,
                             double h);
ParallelFrame parallel_frame(const ManifoldModel& M, const SMPoint& p, double T);

enum class JacobiInit {
  HType,  // J(0) = w, D_t J(0) = 0
  VType,  // J(0) = 0, D_t J(0) = w
};

// Normal Jacobi field in a parallel frame: components u with
// u'' + R(t) u = 0, R_jk = R(E_j, gamma', gamma', E_k).
struct JacobiField {
  ParallelFrame frame;
  JacobiInit init;
  std::vector<Vec> u;     // (n-1)-component coordinates of J
  std::vector<Vec> du;    // coordinates of D_t J
  std::size_t size() const { return frame.size(); }
  double t(std::size_t i) const { return frame.path.ts[i]; }
  double J_norm(std::size_t i) const { return u[i].norm(); }
  double DtJ_norm(std::size_t i) const { return du[i].norm(); }
};

// w is given in frame coordinates ((n-1)-vector, |w| = 1).
JacobiField solve_jacobi(const ManifoldModel& M, const SMPoint& p, double T,
                         double h, JacobiInit init, const Vec& w);
JacobiField solve_jacobi(const ManifoldModel& M, const SMPoint& p, double T,
                         JacobiInit init, const Vec& w);

// Rauch comparison: |J(t)| <= |J(0)| cosh(sqrt(K0) t)
//                          + |D_t J(0)| sinh(sqrt(K0) t)/sqrt(K0).
// Returns min over samples of (bound - |J(t)|).
double check_rauch_bound(const JacobiField& J, double K0);

struct GronwallReport {
  // min over t in [t0, T] of (g(t0) e^{2 int_{t0}^t s K(gamma(s)) ds} - g(t)),
  // g(t) = |D_t J| + |J/t - D_t J|.
  double min_slack;
  double g_t0;
  double integral_factor_end;  // e^{2 int_{t0}^T s K ds}
  // max over t >= t0 of |J(t)| / ((t+1) g(t0) e^{2 int})  (<= 1 when the
  // derived linear growth bound holds)
  double linear_growth_ratio;
};

GronwallReport check_gronwall_bound(const JacobiField& J,
                                    const ManifoldModel& M, double t0);

}  // namespace xrt
