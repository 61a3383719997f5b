#pragma once

#include <limits>
#include <string>
#include <vector>

#include "xrt/manifold.hpp"

namespace xrt {

// Point of the unit sphere bundle; v is renormalized to |v|_g = 1.
struct SMPoint {
  Vec x;
  Vec v;

  SMPoint(const ManifoldModel& M, Vec x_in, Vec v_in);
  SMPoint reversed() const;
};

// Unit-speed geodesic sampled on a uniform time grid.
struct GeodesicPath {
  const ManifoldModel* model = nullptr;
  double T = 0.0;
  double h = 0.0;
  std::vector<double> ts;
  std::vector<Vec> xs;
  std::vector<Vec> vs;

  std::size_t size() const { return ts.size(); }
  SMPoint at(std::size_t i) const { return SMPoint(*model, xs[i], vs[i]); }
  double max_speed_drift() const;
  void save_csv(const std::string& path) const;
};

// Fixed-step RK4 on the first-order geodesic system. If |v|_g drifts by more
// than 1e-6 the step is halved and the integration restarted (at most 10
// halvings).
GeodesicPath integrate_geodesic(const ManifoldModel& M, const SMPoint& p,
                                double T, double h);

// Convenience default: h = min(1e-2, T/1000).
GeodesicPath integrate_geodesic(const ManifoldModel& M, const SMPoint& p,
                                double T);

// Single flow step phi_t(x, v); t may be negative.
SMPoint geodesic_flow(const ManifoldModel& M, const SMPoint& p, double t,
                      double h);

double distance(const ManifoldModel& M, const Vec& x, const Vec& y);

// Horizontal flow of (x, v) in the direction w: the base point moves time s
// along the geodesic starting with velocity w while v is parallel
// transported. RK4 on the joint system.
SMPoint parallel_transport_flow(const ManifoldModel& M, const SMPoint& p,
                                const Vec& w, double s, int steps = 8);

// True iff d(gamma(t), o) is nondecreasing at t = 0; by strict convexity of
// the squared distance this is equivalent to the geodesic escaping. Ties
// (h'(0) = 0) count as escaping for both directions.
bool is_escaping(const ManifoldModel& M, const SMPoint& p);

struct DistanceBoundsReport {
  bool escaping = false;
  // min over samples of d(gamma(t), o) - (t - d(x, o))
  double min_slack_triangle = std::numeric_limits<double>::infinity();
  // min of d(gamma(t), o) - sqrt(d(x, o)^2 + t^2); escaping geodesics only
  double min_slack_escaping = std::numeric_limits<double>::infinity();
  // min against the weaker piecewise bound; escaping geodesics only
  double min_slack_piecewise = std::numeric_limits<double>::infinity();
};

DistanceBoundsReport check_distance_bounds(const ManifoldModel& M,
                                           const SMPoint& p, double T);

}  // namespace xrt
