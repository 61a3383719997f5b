#pragma once

#include <vector>

#include "xrt/geodesic.hpp"
#include "xrt/rng.hpp"

namespace xrt::testing {

// Random phase points with base points uniform in a chart disk and chart
// directions uniform on the circle (renormalized to |v|_g = 1 by SMPoint).
inline std::vector<SMPoint> random_seeds(const ManifoldModel& M, int n,
                                         double radius, Rng& rng) {
  std::vector<SMPoint> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i)
    out.emplace_back(M, rng.in_disk(radius), rng.direction2());
  return out;
}

inline std::vector<SMPoint> random_escaping_seeds(const ManifoldModel& M, int n,
                                                  double radius, Rng& rng) {
  std::vector<SMPoint> out;
  out.reserve(n);
  while (static_cast<int>(out.size()) < n) {
    SMPoint p(M, rng.in_disk(radius), rng.direction2());
    if (is_escaping(M, p)) out.push_back(p);
  }
  return out;
}

}  // namespace xrt::testing
