#include "xrt/harmonics2d.hpp"

#include <cmath>
#include <stdexcept>

namespace xrt {

using Cplx = std::complex<double>;
using VecC = Eigen::VectorXcd;
using MatC = Eigen::MatrixXcd;

FrameData frame_at(const ManifoldModel& M, const Vec& x) {
  if (M.dim() != 2) throw std::invalid_argument("frame_at: dimension 2 only");
  const Mat g = M.metric(x);
  FrameData fr;
  const double a = 1.0 / std::sqrt(g(0, 0));
  fr.F1 = Vec(2);
  fr.F1 << a, 0.0;
  Vec e2(2);
  e2 << 0.0, 1.0;
  Vec f2 = e2 - (fr.F1.dot(g * e2)) * fr.F1;
  fr.F2 = f2 / std::sqrt(f2.dot(g * f2));
  fr.sqrt_det_g = std::sqrt(g.determinant());
  // omega(w) = g(nabla_w F1, F2) = a w^k Gamma^l_{k1} (g F2)_l; the
  // derivative of the normalization a drops out by g(d1, F2) = 0.
  const std::vector<Mat> G = M.christoffel(x);
  const Vec gF2 = g * fr.F2;
  auto omega = [&](const Vec& w) {
    double s = 0.0;
    for (int l = 0; l < 2; ++l)
      for (int k = 0; k < 2; ++k) s += w(k) * G[l](k, 0) * gF2(l);
    return a * s;
  };
  fr.w1 = omega(fr.F1);
  fr.w2 = omega(fr.F2);
  return fr;
}

namespace {

std::vector<FrameData> frame_cache(const ManifoldModel& M,
                                   const SpatialGrid& grid) {
  std::vector<FrameData> frames(grid.nodes());
  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix)
      frames[grid.index(ix, iy)] = frame_at(M, grid.node(ix, iy));
  return frames;
}

// 4th-order central difference with zero extension outside the box
// (functions are compactly supported well inside it).
template <typename Storage>
Storage spatial_derivative(const Storage& u, const SpatialGrid& g, bool xdir) {
  Storage out = Storage::Zero(u.rows(), u.cols());
  auto sample = [&](int ix, int iy, int col) -> typename Storage::Scalar {
    if (ix < 0 || iy < 0 || ix >= g.nx || iy >= g.ny) return {};
    return u(g.index(ix, iy), col);
  };
  const double h = xdir ? g.hx : g.hy;
  for (Eigen::Index col = 0; col < u.cols(); ++col)
    for (int iy = 0; iy < g.ny; ++iy)
      for (int ix = 0; ix < g.nx; ++ix) {
        const int dx = xdir ? 1 : 0, dy = xdir ? 0 : 1;
        out(g.index(ix, iy), col) =
            (-sample(ix + 2 * dx, iy + 2 * dy, col) +
             8.0 * sample(ix + dx, iy + dy, col) -
             8.0 * sample(ix - dx, iy - dy, col) +
             sample(ix - 2 * dx, iy - 2 * dy, col)) /
            (12.0 * h);
      }
  return out;
}

double node_weight(const FrameData& fr, const SpatialGrid& g) {
  return fr.sqrt_det_g * g.hx * g.hy;
}

}  // namespace

SMGridFunction::SMGridFunction(SpatialGrid grid, int ntheta,
                               double support_radius)
    : grid_(grid), ntheta_(ntheta), support_radius_(support_radius),
      values_(Mat::Zero(grid.nodes(), ntheta)) {
  if (ntheta < 4 || ntheta % 2 != 0)
    throw std::invalid_argument("SMGridFunction: ntheta must be even, >= 4");
  const double margin = 3.5 * std::max(grid.hx, grid.hy);
  const double half_x = std::min(-grid.x0, grid.x0 + (grid.nx - 1) * grid.hx);
  const double half_y = std::min(-grid.y0, grid.y0 + (grid.ny - 1) * grid.hy);
  if (support_radius > std::min(half_x, half_y) - margin)
    throw std::invalid_argument(
        "SMGridFunction: support must be >= 3 stencils inside the box");
}

SMGridFunction sample_sm(const ManifoldModel& M, const SpatialGrid& grid,
                         int ntheta, const SMFunction& fn,
                         double support_radius) {
  SMGridFunction u(grid, ntheta, support_radius);
  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix) {
      const Vec x = grid.node(ix, iy);
      const FrameData fr = frame_at(M, x);
      for (int j = 0; j < ntheta; ++j) {
        const double a = u.theta(j);
        u.at(grid.index(ix, iy), j) =
            fn(x, std::cos(a) * fr.F1 + std::sin(a) * fr.F2);
      }
    }
  return u;
}

SMGridFunction sample_tensor(const ManifoldModel& M, const SpatialGrid& grid,
                             int ntheta, const SymmetricTensorField& f,
                             double support_radius) {
  return sample_sm(
      M, grid, ntheta,
      [&](const Vec& x, const Vec& v) { return lambda_eval(f, x, v); },
      support_radius);
}

FourierModes vertical_fourier(const SMGridFunction& u, int kmax) {
  const int nt = u.ntheta();
  if (nt < 2 * kmax + 2)
    throw std::invalid_argument("vertical_fourier: need ntheta >= 2 kmax + 2");
  FourierModes m;
  m.grid = u.grid();
  m.kmax = kmax;
  m.support_radius = u.support_radius();
  // Analysis matrix: coeff = values * W with W_{j, kmax+k} = e^{-ik theta_j}/nt.
  MatC W(nt, 2 * kmax + 1);
  for (int j = 0; j < nt; ++j)
    for (int k = -kmax; k <= kmax; ++k)
      W(j, kmax + k) = std::polar(1.0 / nt, -k * u.theta(j));
  m.coeff = u.values() * W;
  const double total = u.values().squaredNorm() / nt;
  const double band = m.coeff.squaredNorm();
  m.aliased_fraction = total > 0 ? std::max(0.0, total - band) / total : 0.0;
  return m;
}

SMGridFunction synthesize(const FourierModes& m, int ntheta) {
  SMGridFunction u(m.grid, ntheta, m.support_radius);
  MatC S(2 * m.kmax + 1, ntheta);
  for (int j = 0; j < ntheta; ++j)
    for (int k = -m.kmax; k <= m.kmax; ++k)
      S(m.kmax + k, j) = std::polar(1.0, k * u.theta(j));
  u.values() = (m.coeff * S).real();
  return u;
}

FourierModes mode_select(const FourierModes& m, int k) {
  if (k < 0 || k > m.kmax)
    throw std::invalid_argument("mode_select: k out of band");
  FourierModes out = m;
  out.coeff.setZero();
  out.coeff.col(m.col(k)) = m.coeff.col(m.col(k));
  if (k > 0) out.coeff.col(m.col(-k)) = m.coeff.col(m.col(-k));
  out.aliased_fraction = 0.0;
  return out;
}

double sm_inner(const ManifoldModel& M, const SMGridFunction& u,
                const SMGridFunction& w) {
  if (u.ntheta() != w.ntheta() || u.grid().nodes() != w.grid().nodes())
    throw std::invalid_argument("sm_inner: grid mismatch");
  const SpatialGrid& g = u.grid();
  const double dtheta = 2.0 * kPi / u.ntheta();
  double sum = 0.0;
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      const int node = g.index(ix, iy);
      const FrameData fr = frame_at(M, g.node(ix, iy));
      sum += node_weight(fr, g) * dtheta *
             u.values().row(node).dot(w.values().row(node));
    }
  return sum;
}

double sm_norm(const ManifoldModel& M, const SMGridFunction& u) {
  return std::sqrt(std::max(0.0, sm_inner(M, u, u)));
}

double modes_norm(const ManifoldModel& M, const FourierModes& m) {
  const SpatialGrid& g = m.grid;
  double sum = 0.0;
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      const int node = g.index(ix, iy);
      const FrameData fr = frame_at(M, g.node(ix, iy));
      sum += node_weight(fr, g) * 2.0 * kPi * m.coeff.row(node).squaredNorm();
    }
  return std::sqrt(sum);
}

namespace {

// Full-band spectral multiplier in the fiber: factor(k) applied to the
// signed frequency of each angular DFT bin.
SMGridFunction spectral_fiber_op(const SMGridFunction& u,
                                 const std::function<Cplx(int)>& factor) {
  const int nt = u.ntheta();
  MatC W(nt, nt), S(nt, nt);
  for (int j = 0; j < nt; ++j)
    for (int b = 0; b < nt; ++b) {
      int k = b <= nt / 2 ? b : b - nt;
      W(j, b) = std::polar(1.0 / nt, -k * u.theta(j));
      S(b, j) = std::polar(1.0, k * u.theta(j)) * factor(k);
    }
  SMGridFunction out(u.grid(), nt, u.support_radius());
  out.values() = (u.values() * W * S).real();
  return out;
}

}  // namespace

SMGridFunction vertical_derivative(const SMGridFunction& u) {
  const int nt = u.ntheta();
  return spectral_fiber_op(u, [nt](int k) {
    // The Nyquist bin has no consistent odd derivative; drop it.
    return std::abs(k) == nt / 2 ? Cplx(0, 0) : Cplx(0, k);
  });
}

SMGridFunction vertical_laplacian(const SMGridFunction& u) {
  return spectral_fiber_op(
      u, [](int k) { return Cplx(static_cast<double>(k) * k, 0); });
}

namespace {

// P and Q on grid values (real, per angle column).
void horizontal_PQ(const ManifoldModel& M, const SMGridFunction& u, Mat& P,
                   Mat& Q) {
  const SpatialGrid& g = u.grid();
  const Mat dx = spatial_derivative(u.values(), g, true);
  const Mat dy = spatial_derivative(u.values(), g, false);
  const Mat da = vertical_derivative(u).values();
  P.resize(u.values().rows(), u.values().cols());
  Q.resize(u.values().rows(), u.values().cols());
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      const int node = g.index(ix, iy);
      const FrameData fr = frame_at(M, g.node(ix, iy));
      P.row(node) = fr.F1(0) * dx.row(node) + fr.F1(1) * dy.row(node) -
                    fr.w1 * da.row(node);
      Q.row(node) = fr.F2(0) * dx.row(node) + fr.F2(1) * dy.row(node) -
                    fr.w2 * da.row(node);
    }
}

}  // namespace

SMGridFunction apply_X_grid(const ManifoldModel& M, const SMGridFunction& u) {
  Mat P, Q;
  horizontal_PQ(M, u, P, Q);
  SMGridFunction out(u.grid(), u.ntheta(), u.support_radius());
  for (int j = 0; j < u.ntheta(); ++j)
    out.values().col(j) =
        std::cos(u.theta(j)) * P.col(j) + std::sin(u.theta(j)) * Q.col(j);
  return out;
}

SMGridFunction apply_Xperp_grid(const ManifoldModel& M,
                                const SMGridFunction& u) {
  Mat P, Q;
  horizontal_PQ(M, u, P, Q);
  SMGridFunction out(u.grid(), u.ntheta(), u.support_radius());
  for (int j = 0; j < u.ntheta(); ++j)
    out.values().col(j) =
        std::sin(u.theta(j)) * P.col(j) - std::cos(u.theta(j)) * Q.col(j);
  return out;
}

FlowDerivatives apply_flows(const ManifoldModel& M, const SMFunction& fn,
                            const SpatialGrid& grid, int ntheta, double delta,
                            double support_radius) {
  FlowDerivatives d{SMGridFunction(grid, ntheta, support_radius),
                    SMGridFunction(grid, ntheta, support_radius),
                    SMGridFunction(grid, ntheta, support_radius)};
  auto eval = [&](const SMPoint& q) { return fn(q.x, q.v); };
  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix) {
      const int node = grid.index(ix, iy);
      const Vec x = grid.node(ix, iy);
      const FrameData fr = frame_at(M, x);
      for (int j = 0; j < ntheta; ++j) {
        const double a = 2.0 * kPi * j / ntheta;
        const Vec v = std::cos(a) * fr.F1 + std::sin(a) * fr.F2;
        const Vec w = -std::sin(a) * fr.F1 + std::cos(a) * fr.F2;  // v_perp
        const SMPoint p(M, x, v);
        d.Xu.at(node, j) = (eval(geodesic_flow(M, p, delta, delta / 4.0)) -
                            eval(geodesic_flow(M, p, -delta, delta / 4.0))) /
                           (2.0 * delta);
        // X_perp u = -H_{v_perp} u: horizontal gradient = -(X_perp u) v_perp.
        d.Xperp_u.at(node, j) =
            -(eval(parallel_transport_flow(M, p, w, delta)) -
              eval(parallel_transport_flow(M, p, w, -delta))) /
            (2.0 * delta);
        const double c = std::cos(delta), s = std::sin(delta);
        d.Vu.at(node, j) =
            (fn(x, c * v + s * w) - fn(x, c * v - s * w)) / (2.0 * delta);
      }
    }
  return d;
}

namespace {

// Contribution of the signed mode s with coefficients c to the target modes
// s+1 ("up") and s-1 ("down"):
//   X (c e^{is a}) = 1/2 (A - iB) e^{i(s+1)a} + 1/2 (A + iB) e^{i(s-1)a}
// with A = F1 . dc - i s w1 c, B = F2 . dc - i s w2 c. X_perp contributes
// -i (A - iB)/2 up and +i (A + iB)/2 down.
struct TargetPair {
  VecC up, down;
};

TargetPair mode_shift(const SpatialGrid& g, int s,
                      const VecC& c, const std::vector<FrameData>& frames) {
  const MatC dxm = spatial_derivative(MatC(c), g, true);
  const MatC dym = spatial_derivative(MatC(c), g, false);
  TargetPair t{VecC(c.size()), VecC(c.size())};
  const Cplx I(0.0, 1.0);
  for (int node = 0; node < g.nodes(); ++node) {
    const FrameData& fr = frames[node];
    const Cplx A = fr.F1(0) * dxm(node, 0) + fr.F1(1) * dym(node, 0) -
                   I * static_cast<double>(s) * fr.w1 * c(node);
    const Cplx B = fr.F2(0) * dxm(node, 0) + fr.F2(1) * dym(node, 0) -
                   I * static_cast<double>(s) * fr.w2 * c(node);
    t.up(node) = 0.5 * (A - I * B);
    t.down(node) = 0.5 * (A + I * B);
  }
  return t;
}

FourierModes zero_modes(const SpatialGrid& g, int kmax, double support_radius) {
  FourierModes m;
  m.grid = g;
  m.kmax = kmax;
  m.support_radius = support_radius;
  m.coeff = MatC::Zero(g.nodes(), 2 * kmax + 1);
  return m;
}

FourierModes pad_modes(const FourierModes& m, int kmax) {
  if (kmax < m.kmax) throw std::invalid_argument("pad_modes: shrinking band");
  FourierModes out = zero_modes(m.grid, kmax, m.support_radius);
  out.coeff.block(0, kmax - m.kmax, m.coeff.rows(), m.coeff.cols()) = m.coeff;
  return out;
}

}  // namespace

SplitModes split_Xpm(const ManifoldModel& M, const FourierModes& u, int k) {
  if (k < 0 || k > u.kmax)
    throw std::invalid_argument("split_Xpm: k out of band");
  const SpatialGrid& g = u.grid;
  const std::vector<FrameData> frames = frame_cache(M, g);
  const int kb = k + 1;
  SplitModes out{zero_modes(g, kb, u.support_radius),
                 zero_modes(g, kb, u.support_radius), 0.0};
  for (int s : (k == 0 ? std::vector<int>{0} : std::vector<int>{k, -k})) {
    const TargetPair t = mode_shift(g, s, u.coeff.col(u.col(s)), frames);
    // |s + 1| and |s - 1|: the outer target carries X_plus, the inner X_minus.
    if (std::abs(s + 1) == k + 1)
      out.plus.coeff.col(out.plus.col(s + 1)) += t.up;
    else
      out.minus.coeff.col(out.minus.col(s + 1)) += t.up;
    if (std::abs(s - 1) == k + 1)
      out.plus.coeff.col(out.plus.col(s - 1)) += t.down;
    else
      out.minus.coeff.col(out.minus.col(s - 1)) += t.down;
  }
  // Leakage through the grid pipeline: synthesize u_k, apply X on the grid,
  // measure angular energy outside modes k +- 1.
  const int nt = std::max(16, 2 * (k + 3) + 2);
  const SMGridFunction Xg = apply_X_grid(M, synthesize(mode_select(u, k), nt));
  const FourierModes full = vertical_fourier(Xg, nt / 2 - 1);
  const double total = full.coeff.squaredNorm();
  double inside = 0.0;
  for (int a = -full.kmax; a <= full.kmax; ++a)
    if (std::abs(a) == k + 1 || std::abs(a) == std::abs(k - 1))
      inside += full.coeff.col(full.col(a)).squaredNorm();
  out.leakage = total > 0 ? std::max(0.0, total - inside) / total : 0.0;
  return out;
}

std::vector<ContractionRatio> contraction_check(const ManifoldModel& M,
                                                const FourierModes& u,
                                                int kmax) {
  if (kmax > u.kmax)
    throw std::invalid_argument("contraction_check: kmax above band");
  const double floor = 1e-10 * modes_norm(M, u);
  std::vector<ContractionRatio> out;
  for (int k = 1; k <= kmax; ++k) {
    const SplitModes s = split_Xpm(M, u, k);
    ContractionRatio r;
    r.k = k;
    r.nplus = modes_norm(M, s.plus);
    r.nminus = modes_norm(M, s.minus);
    r.skipped = r.nplus < floor;
    r.ratio = r.skipped ? 0.0 : r.nminus / r.nplus;
    out.push_back(r);
  }
  return out;
}

double norm_splitting_check(const ManifoldModel& M, const FourierModes& u) {
  const SpatialGrid& g = u.grid;
  const std::vector<FrameData> frames = frame_cache(M, g);
  const int kb = u.kmax + 1;
  FourierModes plus = zero_modes(g, kb, u.support_radius);
  FourierModes minus = zero_modes(g, kb, u.support_radius);
  FourierModes xall = zero_modes(g, kb, u.support_radius);
  FourierModes xperp = zero_modes(g, kb, u.support_radius);
  const Cplx I(0.0, 1.0);
  for (int s = -u.kmax; s <= u.kmax; ++s) {
    const TargetPair t = mode_shift(g, s, u.coeff.col(u.col(s)), frames);
    const int k = std::abs(s);
    FourierModes& up_dst = (std::abs(s + 1) == k + 1) ? plus : minus;
    FourierModes& dn_dst = (std::abs(s - 1) == k + 1) ? plus : minus;
    up_dst.coeff.col(up_dst.col(s + 1)) += t.up;
    dn_dst.coeff.col(dn_dst.col(s - 1)) += t.down;
    xall.coeff.col(xall.col(s + 1)) += t.up;
    xall.coeff.col(xall.col(s - 1)) += t.down;
    xperp.coeff.col(xperp.col(s + 1)) += -I * t.up;
    xperp.coeff.col(xperp.col(s - 1)) += I * t.down;
  }
  auto sq = [&](const FourierModes& m) {
    const double n = modes_norm(M, m);
    return n * n;
  };
  return (sq(xall) + sq(xperp)) - (sq(plus) + sq(minus));
}

double recursion_defect(const ManifoldModel& M, const FourierModes& u, int k) {
  if (k + 2 > u.kmax)
    throw std::invalid_argument("recursion_defect: need band up to k + 2");
  const FourierModes a = pad_modes(split_Xpm(M, u, k).plus, k + 3);
  const FourierModes b = pad_modes(split_Xpm(M, u, k + 2).minus, k + 3);
  FourierModes sum = a;
  sum.coeff += b.coeff;
  return modes_norm(M, sum);
}

}  // namespace xrt
