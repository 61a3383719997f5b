#include "xrt/jacobi.hpp"

#include <cmath>
#include <stdexcept>

namespace xrt {

namespace {

// Joint state: x, v, E_1..E_{n-1}, u, du. Integrating everything on one RK4
// grid keeps the residual invariants grid-exact.
struct JointState {
  Vec x;
  Vec v;
  Mat E;   // n x (n-1)
  Vec u;   // n-1
  Vec du;  // n-1
};

JointState operator+(const JointState& a, const JointState& b) {
  return {a.x + b.x, a.v + b.v, a.E + b.E, a.u + b.u, a.du + b.du};
}
JointState operator*(double c, const JointState& a) {
  return {c * a.x, c * a.v, c * a.E, c * a.u, c * a.du};
}

JointState rate(const ManifoldModel& M, const JointState& s) {
  const int n = M.dim();
  JointState d;
  d.x = s.v;
  d.v = -M.christoffel_uv(s.x, s.v, s.v);
  d.E.resize(n, n - 1);
  Mat R(n - 1, n - 1);
  std::vector<Vec> Rcol(n - 1);
  for (int a = 0; a < n - 1; ++a) {
    d.E.col(a) = -M.christoffel_uv(s.x, s.v, s.E.col(a));
    Rcol[a] = M.curvature_operator(s.x, s.E.col(a), s.v);
  }
  for (int a = 0; a < n - 1; ++a)
    for (int b = 0; b < n - 1; ++b)
      R(a, b) = M.inner(s.x, Rcol[a], s.E.col(b));
  d.u = s.du;
  d.du = -R * s.u;
  return d;
}

JointState rk4(const ManifoldModel& M, const JointState& s, double h) {
  const JointState k1 = rate(M, s);
  const JointState k2 = rate(M, s + 0.5 * h * k1);
  const JointState k3 = rate(M, s + 0.5 * h * k2);
  const JointState k4 = rate(M, s + h * k3);
  return s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Mat initial_normal_frame(const ManifoldModel& M, const SMPoint& p) {
  const int n = M.dim();
  Mat E(n, n - 1);
  int col = 0;
  for (int i = 0; i < n && col < n - 1; ++i) {
    Vec e = Vec::Zero(n);
    e(i) = 1.0;
    // Gram-Schmidt against v and the columns already accepted.
    e -= M.inner(p.x, e, p.v) * p.v;
    for (int j = 0; j < col; ++j) e -= M.inner(p.x, e, E.col(j)) * E.col(j);
    const double nrm = M.norm(p.x, e);
    if (nrm < 1e-8) continue;
    E.col(col++) = e / nrm;
  }
  if (col != n - 1)
    throw std::runtime_error("parallel_frame: failed to build initial frame");
  return E;
}

struct Integrated {
  ParallelFrame frame;
  std::vector<Vec> u;
  std::vector<Vec> du;
};

Integrated integrate_joint(const ManifoldModel& M, const SMPoint& p, double T,
                           double h, const Vec& u0, const Vec& du0) {
  const int n = M.dim();
  const std::size_t steps = static_cast<std::size_t>(std::ceil(T / h - 1e-12));
  const double step = T / static_cast<double>(steps);
  JointState s{p.x, p.v, initial_normal_frame(M, p), u0, du0};

  Integrated out;
  out.frame.path.model = &M;
  out.frame.path.T = T;
  out.frame.path.h = step;
  for (std::size_t i = 0; i <= steps; ++i) {
    out.frame.path.ts.push_back(static_cast<double>(i) * step);
    out.frame.path.xs.push_back(s.x);
    out.frame.path.vs.push_back(s.v);
    out.frame.frames.push_back(s.E);
    out.u.push_back(s.u);
    out.du.push_back(s.du);
    // Frame degeneracy guard.
    Mat gram(n - 1, n - 1);
    for (int a = 0; a < n - 1; ++a)
      for (int b = 0; b < n - 1; ++b)
        gram(a, b) = M.inner(s.x, s.E.col(a), s.E.col(b));
    if (gram.determinant() < 0.5)
      throw std::runtime_error("parallel_frame: frame degenerated");
    if (i < steps) s = rk4(M, s, step);
  }
  return out;
}

}  // namespace

ParallelFrame parallel_frame(const ManifoldModel& M, const SMPoint& p, double T,
                             double h) {
  const int n = M.dim();
  return integrate_joint(M, p, T, h, Vec::Zero(n - 1), Vec::Zero(n - 1)).frame;
}

ParallelFrame parallel_frame(const ManifoldModel& M, const SMPoint& p, double T) {
  return parallel_frame(M, p, T, std::min(1e-2, T / 1000.0));
}

double ParallelFrame::orthonormality_defect() const {
  const ManifoldModel& M = *path.model;
  const int n = M.dim();
  double defect = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    for (int a = 0; a < n - 1; ++a) {
      defect = std::max(defect,
                        std::abs(M.inner(path.xs[i], frames[i].col(a), path.vs[i])));
      for (int b = 0; b < n - 1; ++b) {
        const double g = M.inner(path.xs[i], frames[i].col(a), frames[i].col(b));
        defect = std::max(defect, std::abs(g - (a == b ? 1.0 : 0.0)));
      }
    }
  }
  return defect;
}

JacobiField solve_jacobi(const ManifoldModel& M, const SMPoint& p, double T,
                         double h, JacobiInit init, const Vec& w) {
  const int n = M.dim();
  if (w.size() != n - 1)
    throw std::invalid_argument("solve_jacobi: w must have n-1 frame components");
  const Vec zero = Vec::Zero(n - 1);
  Integrated res = (init == JacobiInit::HType)
                       ? integrate_joint(M, p, T, h, w, zero)
                       : integrate_joint(M, p, T, h, zero, w);
  JacobiField J;
  J.frame = std::move(res.frame);
  J.init = init;
  J.u = std::move(res.u);
  J.du = std::move(res.du);
  return J;
}

JacobiField solve_jacobi(const ManifoldModel& M, const SMPoint& p, double T,
                         JacobiInit init, const Vec& w) {
  return solve_jacobi(M, p, T, std::min(1e-2, T / 1000.0), init, w);
}

double check_rauch_bound(const JacobiField& J, double K0) {
  if (!(K0 > 0)) throw std::invalid_argument("check_rauch_bound: K0 must be > 0");
  const double s = std::sqrt(K0);
  const double J0 = J.u.front().norm();
  const double dJ0 = J.du.front().norm();
  double min_slack = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < J.size(); ++i) {
    const double t = J.t(i);
    const double bound = J0 * std::cosh(s * t) + dJ0 * std::sinh(s * t) / s;
    min_slack = std::min(min_slack, bound - J.J_norm(i));
  }
  return min_slack;
}

GronwallReport check_gronwall_bound(const JacobiField& J,
                                    const ManifoldModel& M, double t0) {
  if (!(t0 > 0) || t0 >= J.frame.path.T)
    throw std::invalid_argument("check_gronwall_bound: need 0 < t0 < T");
  const auto& ts = J.frame.path.ts;
  const auto& xs = J.frame.path.xs;
  std::size_t i0 = 0;
  while (i0 + 1 < ts.size() && ts[i0] < t0 - 1e-12) ++i0;

  auto g = [&](std::size_t i) {
    return J.DtJ_norm(i) + (J.u[i] / ts[i] - J.du[i]).norm();
  };
  const double g0 = g(i0);
  GronwallReport rep{};
  rep.g_t0 = g0;
  rep.min_slack = std::numeric_limits<double>::infinity();
  rep.linear_growth_ratio = 0.0;
  double integral = 0.0;  // int_{t0}^t s * K(gamma(s)) ds, trapezoid
  double prev = ts[i0] * M.kappa_bound(xs[i0]);
  for (std::size_t i = i0; i < J.size(); ++i) {
    if (i > i0) {
      const double cur = ts[i] * M.kappa_bound(xs[i]);
      integral += 0.5 * (prev + cur) * (ts[i] - ts[i - 1]);
      prev = cur;
    }
    const double factor = std::exp(2.0 * integral);
    rep.min_slack = std::min(rep.min_slack, g0 * factor - g(i));
    rep.linear_growth_ratio =
        std::max(rep.linear_growth_ratio,
                 J.J_norm(i) / ((ts[i] + 1.0) * g0 * factor));
    rep.integral_factor_end = factor;
  }
  return rep;
}

}  // namespace xrt
