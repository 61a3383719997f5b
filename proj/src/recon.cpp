#include "xrt/recon.hpp"

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace xrt {

double binom(int m, int j) {
  double c = 1.0;
  for (int i = 0; i < j; ++i) c = c * (m - i) / (i + 1);
  return c;
}

namespace {

struct HatCell {
  int ix, iy;
  double fx, fy;
  bool inside;
};

HatCell locate(const SpatialGrid& g, const Vec& x) {
  HatCell c{};
  const double sx = (x(0) - g.x0) / g.hx;
  const double sy = (x(1) - g.y0) / g.hy;
  c.ix = static_cast<int>(std::floor(sx));
  c.iy = static_cast<int>(std::floor(sy));
  c.fx = sx - c.ix;
  c.fy = sy - c.iy;
  c.inside = c.ix >= 0 && c.iy >= 0 && c.ix + 1 < g.nx && c.iy + 1 < g.ny;
  return c;
}

void accumulate_path(const SpatialGrid& grid, int m,
                     double support_radius, const GeodesicPath& path,
                     double dir_sign, std::map<int, double>& row) {
  const double margin = std::max(grid.hx, grid.hy);
  const int nodes = grid.nodes();
  const std::size_t n = path.size() - 1;
  for (std::size_t i = 0; i <= n; ++i) {
    const Vec& x = path.xs[i];
    if (x.norm() > support_radius + margin) continue;
    const HatCell c = locate(grid, x);
    if (!c.inside) continue;
    double wq = path.h / 3.0;
    wq *= (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    const Vec v = dir_sign * path.vs[i];
    const double hats[4] = {(1 - c.fx) * (1 - c.fy), c.fx * (1 - c.fy),
                            (1 - c.fx) * c.fy, c.fx * c.fy};
    const int node_ids[4] = {grid.index(c.ix, c.iy), grid.index(c.ix + 1, c.iy),
                             grid.index(c.ix, c.iy + 1),
                             grid.index(c.ix + 1, c.iy + 1)};
    for (int j = 0; j <= m; ++j) {
      const double mono = binom(m, j) * std::pow(v(0), m - j) * std::pow(v(1), j);
      for (int q = 0; q < 4; ++q) {
        const double w = wq * hats[q] * mono;
        if (w != 0.0) row[j * nodes + node_ids[q]] += w;
      }
    }
  }
}

GeodesicPath support_path(const ManifoldModel& M, const SMPoint& p,
                          double support_radius, const XrayOptions& opt) {
  const double T = support_exit_time(M, p, support_radius, opt.step);
  const std::size_t n =
      2 * static_cast<std::size_t>(std::ceil(T / (2.0 * opt.step)));
  return integrate_geodesic(M, p, T, T / static_cast<double>(n));
}

}  // namespace

ForwardOperator assemble_forward(const ManifoldModel& M,
                                 const SpatialGrid& grid,
                                 const std::vector<SMPoint>& seeds, int m,
                                 double support_radius,
                                 const XrayOptions& opt) {
  if (M.dim() != 2)
    throw std::invalid_argument("assemble_forward: dimension 2 only");
  ForwardOperator op;
  op.model = &M;
  op.grid = grid;
  op.order = m;
  op.support_radius = support_radius;
  op.seeds = seeds;
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    std::map<int, double> row;
    accumulate_path(grid, m, support_radius,
                    support_path(M, seeds[s], support_radius, opt), 1.0, row);
    // u^f(x, -v) with the (-1)^m parity folded into the monomial argument.
    accumulate_path(grid, m, support_radius,
                    support_path(M, seeds[s].reversed(), support_radius, opt),
                    -1.0, row);
    if (row.empty()) op.empty_rows.push_back(static_cast<int>(s));
    for (const auto& [col, w] : row)
      trip.emplace_back(static_cast<int>(s), col, w);
  }
  op.A.resize(static_cast<int>(seeds.size()), op.cols());
  op.A.setFromTriplets(trip.begin(), trip.end());
  return op;
}

Vec discretize(const SpatialGrid& grid, const SymmetricTensorField& f) {
  const int m = f.order();
  const int nodes = grid.nodes();
  Vec out = Vec::Zero(nodes * (m + 1));
  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix) {
      const Vec c = f.components(grid.node(ix, iy));
      for (int j = 0; j <= m; ++j)
        out(j * nodes + grid.index(ix, iy)) = c((1 << j) - 1);
    }
  return out;
}

ReconResult reconstruct(const ForwardOperator& op, const Vec& b, int max_iter,
                        double rtol, const Vec* truth, double ridge) {
  if (!b.allFinite()) throw std::invalid_argument("reconstruct: b not finite");
  const auto& A = op.A;
  ReconResult res;
  res.fhat = Vec::Zero(A.cols());
  const double bnorm = b.norm();
  res.residual_history.push_back(bnorm);
  if (bnorm == 0.0) return res;

  Vec r = b;
  Vec s = A.transpose() * r;
  Vec p = s;
  double gamma = s.squaredNorm();
  // CGLS minimizes the (ridge-)augmented residual; only that norm is
  // monotone, so the abort check uses it.
  double last_mon = bnorm;
  for (int it = 1; it <= max_iter; ++it) {
    const Vec q = A * p;
    const double denom = q.squaredNorm() + ridge * p.squaredNorm();
    if (denom == 0.0) break;
    const double alpha = gamma / denom;
    res.fhat += alpha * p;
    r -= alpha * q;
    const double rn = r.norm();
    const double rmon =
        ridge > 0.0
            ? std::sqrt(r.squaredNorm() + ridge * res.fhat.squaredNorm())
            : rn;
    if (rmon > last_mon * (1.0 + 1e-8) && rn > 10.0 * rtol * bnorm)
      throw std::runtime_error("reconstruct: residual increased at iteration " +
                               std::to_string(it));
    last_mon = rmon;
    res.residual_history.push_back(rn);
    res.iterations = it;
    if (rn <= rtol * bnorm) break;
    s = A.transpose() * r - ridge * res.fhat;
    const double gnew = s.squaredNorm();
    p = s + (gnew / gamma) * p;
    gamma = gnew;
  }
  res.rel_residual = res.residual_history.back() / bnorm;

  if (truth) {
    const int nodes = op.grid.nodes();
    double num = 0.0, den = 0.0;
    for (int iy = 0; iy < op.grid.ny; ++iy)
      for (int ix = 0; ix < op.grid.nx; ++ix) {
        if (op.grid.node(ix, iy).norm() > op.support_radius) continue;
        for (int j = 0; j <= op.order; ++j) {
          const int col = j * nodes + op.grid.index(ix, iy);
          num += std::pow(res.fhat(col) - (*truth)(col), 2);
          den += std::pow((*truth)(col), 2);
        }
      }
    res.rel_error = den > 0 ? std::sqrt(num / den) : -1.0;
  }
  return res;
}

Eigen::SparseMatrix<double> potential_operator(const ManifoldModel& M,
                                               const SpatialGrid& grid,
                                               int m) {
  if (m < 1) throw std::invalid_argument("potential_operator: need m >= 1");
  const int q = m - 1;  // order of the potential h
  const int nodes = grid.nodes();
  std::vector<Eigen::Triplet<double>> trip;
  auto add = [&](int row, int comp, int node, double w) {
    if (w != 0.0) trip.emplace_back(row, comp * nodes + node, w);
  };
  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix) {
      const int nd = grid.index(ix, iy);
      const std::vector<Mat> G = M.christoffel(grid.node(ix, iy));
      // Output component j: representative index with j '2' slots;
      // sigma over the m slots leaves m distinct (k, I) splits.
      for (int j = 0; j <= m; ++j)
        for (int p = 0; p < m; ++p) {
          const int k = p < j ? 1 : 0;   // chart direction of the nabla slot
          const int c = j - k;           // '2' count of the remaining slots
          const int row = j * nodes + nd;
          const double s = 1.0 / m;
          // d_k h_c by 2nd-order central differences (zero extension).
          const int dx = k == 0 ? 1 : 0, dy = k == 1 ? 1 : 0;
          const double h = k == 0 ? grid.hx : grid.hy;
          if (ix + dx < grid.nx && iy + dy < grid.ny)
            add(row, c, grid.index(ix + dx, iy + dy), s / (2.0 * h));
          if (ix - dx >= 0 && iy - dy >= 0)
            add(row, c, grid.index(ix - dx, iy - dy), -s / (2.0 * h));
          // -Gamma^l_{k i} terms, grouped by the value of the i slot:
          // c slots equal to '2' (chart 1) and q - c slots equal to '1'.
          for (int l = 0; l < 2; ++l) {
            if (c >= 1) add(row, c - 1 + l, nd, -s * c * G[l](k, 1));
            if (q - c >= 1) add(row, c + l, nd, -s * (q - c) * G[l](k, 0));
          }
        }
    }
  Eigen::SparseMatrix<double> D(nodes * (m + 1), nodes * m);
  D.setFromTriplets(trip.begin(), trip.end());
  return D;
}

namespace {

// Block-diagonal square root of the node-wise weighted tensor inner product:
// per node, w(x) * Gd with Gd the Gram matrix of the distinct components
// under the m-fold g^{-1} contraction; returns W such that ||W f||^2 equals
// the weighted discrete L^2 tensor norm squared.
Eigen::SparseMatrix<double> weight_sqrt(const ManifoldModel& M,
                                        const SpatialGrid& grid, int m) {
  const int nodes = grid.nodes();
  const int nc = m + 1;
  std::vector<Eigen::Triplet<double>> trip;
  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix) {
      const int nd = grid.index(ix, iy);
      const Vec x = grid.node(ix, iy);
      const Mat g = M.metric(x);
      const Mat ginv = M.metric_inverse(x);
      const double w = std::sqrt(g.determinant()) * grid.hx * grid.hy;
      Mat Gd = Mat::Zero(nc, nc);
      const int nfull = 1 << m;
      for (int I = 0; I < nfull; ++I)
        for (int J = 0; J < nfull; ++J) {
          double prod = 1.0;
          for (int t = 0; t < m; ++t) prod *= ginv((I >> t) & 1, (J >> t) & 1);
          int a = 0, b = 0;
          for (int t = 0; t < m; ++t) {
            a += (I >> t) & 1;
            b += (J >> t) & 1;
          }
          Gd(a, b) += prod;
        }
      const Mat L = Eigen::LLT<Mat>(w * Gd).matrixL();
      for (int a = 0; a < nc; ++a)
        for (int b = 0; b < nc; ++b)
          if (L(b, a) != 0.0)
            trip.emplace_back(a * nodes + nd, b * nodes + nd, L(b, a));
    }
  Eigen::SparseMatrix<double> W(nodes * nc, nodes * nc);
  W.setFromTriplets(trip.begin(), trip.end());
  return W;  // W = L^T blockwise, so ||W f||^2 = f^T (w Gd) f summed
}

}  // namespace

double solenoidal_defect(const ManifoldModel& M, const SpatialGrid& grid,
                         const Vec& fhat, int m) {
  if (m < 1) throw std::invalid_argument("solenoidal_defect: need m >= 1");
  if (fhat.size() != static_cast<Eigen::Index>(grid.nodes()) * (m + 1))
    throw std::invalid_argument("solenoidal_defect: size mismatch");
  const Eigen::SparseMatrix<double> W = weight_sqrt(M, grid, m);
  const Vec g = W * fhat;
  const double gn = g.norm();
  if (gn == 0.0) return 0.0;
  const Eigen::SparseMatrix<double> S =
      (W * potential_operator(M, grid, m)).pruned();
  Eigen::LeastSquaresConjugateGradient<Eigen::SparseMatrix<double>> solver;
  solver.setTolerance(1e-12);
  solver.setMaxIterations(20000);
  solver.compute(S);
  const Vec h = solver.solve(g);
  const double defect = (g - S * h).norm() / gn;
  return std::min(defect, 1.0);
}

KernelScanReport kernel_scan(const ForwardOperator& op) {
  const ManifoldModel& M = *op.model;
  const SpatialGrid& grid = op.grid;
  const int nodes = grid.nodes();
  const int m = op.order;
  std::vector<int> mask;  // nodes inside the support ball
  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix)
      if (grid.node(ix, iy).norm() <= op.support_radius)
        mask.push_back(grid.index(ix, iy));
  const int nm = static_cast<int>(mask.size());

  Mat Ad = Mat::Zero(op.A.rows(), nm * (m + 1));
  const Mat full = Mat(op.A);
  for (int j = 0; j <= m; ++j)
    for (int c = 0; c < nm; ++c)
      Ad.col(j * nm + c) = full.col(j * nodes + mask[c]);

  Eigen::BDCSVD<Mat> svd(Ad, Eigen::ComputeThinV);
  const Vec sv = svd.singularValues();
  KernelScanReport rep;
  rep.sigma_max = sv(0);
  rep.sigma_min = sv(sv.size() - 1);
  rep.ratio = rep.sigma_max > 0 ? rep.sigma_min / rep.sigma_max : 0.0;
  if (m == 0) return rep;

  // Near-kernel: the bottom 5% of the spectrum (by count).
  rep.near_kernel_dim =
      std::max<int>(1, static_cast<int>(sv.size()) / 20);
  if (rep.near_kernel_dim == 0) return rep;
  const Mat K = svd.matrixV().rightCols(rep.near_kernel_dim);

  // Potential subspace: range of the discrete sigma-nabla restricted to the
  // masked nodes (both h and f components).
  const Mat Dfull = Mat(potential_operator(M, grid, m));
  Mat Dm(nm * (m + 1), nm * m);
  for (int j = 0; j <= m; ++j)
    for (int r = 0; r < nm; ++r)
      for (int jc = 0; jc < m; ++jc)
        for (int c = 0; c < nm; ++c)
          Dm(j * nm + r, jc * nm + c) =
              Dfull(j * nodes + mask[r], jc * nodes + mask[c]);
  Eigen::ColPivHouseholderQR<Mat> qr(Dm);
  const int rank = static_cast<int>(qr.rank());
  const Mat Q = Mat(qr.householderQ()).leftCols(rank);

  const Eigen::BDCSVD<Mat> cross(K.transpose() * Q);
  const Vec cs = cross.singularValues();
  const double smin = std::clamp(cs(cs.size() - 1), -1.0, 1.0);
  rep.max_principal_angle_deg = std::acos(smin) * 180.0 / kPi;
  return rep;
}

}  // namespace xrt
