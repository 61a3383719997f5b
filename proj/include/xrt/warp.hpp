#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "xrt/types.hpp"

namespace xrt {

struct WarpEval {
  double f;
  double df;
  double ddf;
};

// Radial warp profile of a rotationally symmetric nonpositively curved
// metric dr^2 + f^2(r) dtheta^2, stored as equispaced samples of f, f', f''
// on [0, r_max] with cubic Hermite interpolation between nodes.
//
// Invariants: f(0) = 0, f'(0) = 1, f > 0 for r > 0 and f'' >= 0.
class WarpedProfile {
 public:
  WarpedProfile(double r_max, double step, std::vector<double> f,
                std::vector<double> df, std::vector<double> ddf);

  double r_max() const { return r_max_; }
  double step() const { return step_; }
  std::size_t size() const { return f_.size(); }
  const std::vector<double>& f_samples() const { return f_; }
  const std::vector<double>& df_samples() const { return df_; }
  const std::vector<double>& ddf_samples() const { return ddf_; }

  WarpEval eval(double r) const;

  // Gaussian curvature -f''/f, extended by continuity at r = 0.
  double curvature(double r) const;
  double curvature_at_zero() const { return k0_; }

  void save_csv(const std::string& path) const;
  static WarpedProfile load_csv(const std::string& path);

 private:
  void validate() const;

  double r_max_;
  double step_;
  double k0_;  // curvature at the origin
  std::vector<double> f_, df_, ddf_;
};

// Solves f'' = -k(r) f, f(0) = 0, f'(0) = 1 with classical fixed-step RK4.
// Rejects curvature samples k > 1e-12 (the construction requires K <= 0).
WarpedProfile profile_from_curvature(const std::function<double(double)>& k,
                                     double r_max, double step);

}  // namespace xrt
