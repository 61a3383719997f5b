#include "xrt/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace xrt {

SMPoint::SMPoint(const ManifoldModel& M, Vec x_in, Vec v_in)
    : x(std::move(x_in)), v(std::move(v_in)) {
  const double n = M.norm(x, v);
  if (!(n > 0)) throw std::invalid_argument("SMPoint: zero tangent vector");
  v /= n;
}

SMPoint SMPoint::reversed() const {
  SMPoint p = *this;
  p.v = -p.v;
  return p;
}

namespace {

struct State {
  Vec x;
  Vec v;
};

inline State rk4_step(const ManifoldModel& M, const State& s, double h) {
  auto acc = [&](const Vec& x, const Vec& v) -> Vec {
    return -M.christoffel_uv(x, v, v);
  };
  const Vec k1x = s.v, k1v = acc(s.x, s.v);
  const Vec x2 = s.x + 0.5 * h * k1x, v2 = s.v + 0.5 * h * k1v;
  const Vec k2x = v2, k2v = acc(x2, v2);
  const Vec x3 = s.x + 0.5 * h * k2x, v3 = s.v + 0.5 * h * k2v;
  const Vec k3x = v3, k3v = acc(x3, v3);
  const Vec x4 = s.x + h * k3x, v4 = s.v + h * k3v;
  const Vec k4x = v4, k4v = acc(x4, v4);
  return {s.x + h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x),
          s.v + h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)};
}

GeodesicPath integrate_once(const ManifoldModel& M, const SMPoint& p, double T,
                            double h, double& drift) {
  const std::size_t n = static_cast<std::size_t>(std::ceil(T / h - 1e-12));
  const double step = T / static_cast<double>(n);
  GeodesicPath path;
  path.model = &M;
  path.T = T;
  path.h = step;
  path.ts.reserve(n + 1);
  path.xs.reserve(n + 1);
  path.vs.reserve(n + 1);
  State s{p.x, p.v};
  drift = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    path.ts.push_back(static_cast<double>(i) * step);
    path.xs.push_back(s.x);
    path.vs.push_back(s.v);
    drift = std::max(drift, std::abs(M.norm(s.x, s.v) - 1.0));
    if (i < n) s = rk4_step(M, s, step);
  }
  return path;
}

}  // namespace

GeodesicPath integrate_geodesic(const ManifoldModel& M, const SMPoint& p,
                                double T, double h) {
  if (!(T > 0) || !(h > 0))
    throw std::invalid_argument("integrate_geodesic: T and h must be positive");
  double step = h;
  for (int attempt = 0; attempt <= 10; ++attempt) {
    double drift;
    GeodesicPath path = integrate_once(M, p, T, step, drift);
    if (drift <= 1e-6) return path;
    step /= 2.0;
  }
  throw std::runtime_error(
      "integrate_geodesic: unit-speed drift persists after 10 step halvings");
}

GeodesicPath integrate_geodesic(const ManifoldModel& M, const SMPoint& p,
                                double T) {
  return integrate_geodesic(M, p, T, std::min(1e-2, T / 1000.0));
}

SMPoint geodesic_flow(const ManifoldModel& M, const SMPoint& p, double t,
                      double h) {
  if (t == 0.0) return p;
  const SMPoint start = t > 0 ? p : p.reversed();
  GeodesicPath path = integrate_geodesic(M, start, std::abs(t), h);
  SMPoint out = path.at(path.size() - 1);
  if (t < 0) out.v = -out.v;
  return out;
}

double GeodesicPath::max_speed_drift() const {
  double d = 0.0;
  for (std::size_t i = 0; i < size(); ++i)
    d = std::max(d, std::abs(model->norm(xs[i], vs[i]) - 1.0));
  return d;
}

void GeodesicPath::save_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("GeodesicPath: cannot open " + path);
  const int n = model->dim();
  out << "t";
  for (int i = 0; i < n; ++i) out << ",x" << i;
  for (int i = 0; i < n; ++i) out << ",v" << i;
  out << "\r\n";
  char buf[64];
  for (std::size_t i = 0; i < size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", ts[i]);
    out << buf;
    for (int j = 0; j < n; ++j) {
      std::snprintf(buf, sizeof(buf), ",%.17g", xs[i](j));
      out << buf;
    }
    for (int j = 0; j < n; ++j) {
      std::snprintf(buf, sizeof(buf), ",%.17g", vs[i](j));
      out << buf;
    }
    out << "\r\n";
  }
}

namespace {

// Geodesic boundary-value problem by shooting: Newton iteration on the
// initial chart angle and the arrival time.
double warped_distance_shooting(const ManifoldModel& M, const Vec& x,
                                const Vec& y) {
  auto shoot = [&](double psi, double T) -> Vec {
    Vec d(2);
    d << std::cos(psi), std::sin(psi);
    SMPoint p(M, x, d);
    GeodesicPath path = integrate_geodesic(M, p, T, std::min(0.01, T / 16.0));
    return path.xs.back() - y;
  };
  double psi = std::atan2(y(1) - x(1), y(0) - x(0));
  double T = (y - x).norm();
  for (int it = 0; it < 100; ++it) {
    const Vec F = shoot(psi, T);
    if (F.norm() < 1e-10) return T;
    const double dp = 1e-6, dT = 1e-6;
    Mat J(2, 2);
    J.col(0) = (shoot(psi + dp, T) - F) / dp;
    J.col(1) = (shoot(psi, T + dT) - F) / dT;
    const Vec delta = J.fullPivLu().solve(F);
    psi -= delta(0);
    T -= delta(1);
    if (!(T > 1e-12)) T = 1e-6;
  }
  throw std::runtime_error("distance: shooting did not converge");
}

}  // namespace

double distance(const ManifoldModel& M, const Vec& x, const Vec& y) {
  switch (M.kind()) {
    case ManifoldModel::Kind::Euclidean:
      return (x - y).norm();
    case ManifoldModel::Kind::Hyperbolic: {
      const double s = std::sqrt(M.hyperbolic_K0());
      const double r1 = x.norm(), r2 = y.norm();
      if (r1 < 1e-14) return r2;
      if (r2 < 1e-14) return r1;
      double c = x.dot(y) / (r1 * r2);
      c = std::clamp(c, -1.0, 1.0);
      const double ch = std::cosh(s * r1) * std::cosh(s * r2) -
                        std::sinh(s * r1) * std::sinh(s * r2) * c;
      return std::acosh(std::max(1.0, ch)) / s;
    }
    case ManifoldModel::Kind::Warped: {
      const double r1 = x.norm(), r2 = y.norm();
      if (r1 < 1e-12) return r2;
      if (r2 < 1e-12) return r1;
      if ((x - y).norm() < 1e-14) return 0.0;
      // Radially aligned points lie on a common metric ray through o.
      const double cross = x(0) * y(1) - x(1) * y(0);
      if (std::abs(cross) < 1e-14 * r1 * r2) {
        if (x.dot(y) > 0) return std::abs(r1 - r2);
        return r1 + r2;
      }
      return warped_distance_shooting(M, x, y);
    }
  }
  return 0.0;
}

SMPoint parallel_transport_flow(const ManifoldModel& M, const SMPoint& p,
                                const Vec& w, double s, int steps) {
  Vec x = p.x;
  Vec wd = s >= 0 ? w : Vec(-w);
  Vec vpar = p.v;
  const double h = std::abs(s) / steps;
  auto rate = [&M](const Vec& x_, const Vec& w_, const Vec& v_, Vec& dx,
                   Vec& dw, Vec& dv) {
    dx = w_;
    dw = -M.christoffel_uv(x_, w_, w_);
    dv = -M.christoffel_uv(x_, w_, v_);
  };
  for (int i = 0; i < steps; ++i) {
    Vec k1x, k1w, k1v, k2x, k2w, k2v, k3x, k3w, k3v, k4x, k4w, k4v;
    rate(x, wd, vpar, k1x, k1w, k1v);
    rate(x + 0.5 * h * k1x, wd + 0.5 * h * k1w, vpar + 0.5 * h * k1v, k2x, k2w,
         k2v);
    rate(x + 0.5 * h * k2x, wd + 0.5 * h * k2w, vpar + 0.5 * h * k2v, k3x, k3w,
         k3v);
    rate(x + h * k3x, wd + h * k3w, vpar + h * k3v, k4x, k4w, k4v);
    x += h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
    wd += h / 6.0 * (k1w + 2 * k2w + 2 * k3w + k4w);
    vpar += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
  }
  return SMPoint(M, x, vpar);
}

bool is_escaping(const ManifoldModel& M, const SMPoint& p) {
  const double r = p.x.norm();
  if (r < 1e-12) return true;
  // d/dt d(gamma(t), o)|_0 = <v, grad d(., o)> with grad d = unit radial.
  return M.inner(p.x, p.v, p.x / r) >= 0.0;
}

DistanceBoundsReport check_distance_bounds(const ManifoldModel& M,
                                           const SMPoint& p, double T) {
  DistanceBoundsReport rep;
  rep.escaping = is_escaping(M, p);
  const double d0 = p.x.norm();  // d(x, o) in normal coordinates
  GeodesicPath path = integrate_geodesic(M, p, T);
  for (std::size_t i = 0; i < path.size(); ++i) {
    const double t = path.ts[i];
    const double d = path.xs[i].norm();
    rep.min_slack_triangle = std::min(rep.min_slack_triangle, d - (t - d0));
    if (rep.escaping) {
      rep.min_slack_escaping =
          std::min(rep.min_slack_escaping, d - std::sqrt(d0 * d0 + t * t));
      const double piecewise = (t <= 2.0 * d0) ? d0 : (t - d0);
      rep.min_slack_piecewise = std::min(rep.min_slack_piecewise, d - piecewise);
    }
  }
  return rep;
}

}  // namespace xrt
