#pragma once

#include <Eigen/Sparse>

#include "xrt/harmonics2d.hpp"
#include "xrt/xray.hpp"

namespace xrt {

// 2-D symmetric order-m tensors have m+1 distinct components, indexed by the
// number j of '2' slots; the v-monomial of component j carries the
// multinomial weight binom(m, j).
double binom(int m, int j);

// Discretized geodesic transform: one row per seed, one column per
// (grid node, distinct component); column = node + nodes * j. Entries are
// Simpson quadrature weights times bilinear hat weights times the v-monomial.
struct ForwardOperator {
  const ManifoldModel* model = nullptr;
  SpatialGrid grid;
  int order = 0;
  double support_radius = 0.0;
  std::vector<SMPoint> seeds;
  Eigen::SparseMatrix<double, Eigen::RowMajor> A;
  std::vector<int> empty_rows;  // seeds whose geodesic misses the support

  int cols() const { return grid.nodes() * (order + 1); }
};

ForwardOperator assemble_forward(const ManifoldModel& M,
                                 const SpatialGrid& grid,
                                 const std::vector<SMPoint>& seeds, int m,
                                 double support_radius,
                                 const XrayOptions& opt = {});

// Node values of the distinct components, stacked component-block first.
Vec discretize(const SpatialGrid& grid, const SymmetricTensorField& f);

struct ReconResult {
  Vec fhat;
  double rel_residual = 0.0;
  int iterations = 0;
  std::vector<double> residual_history;
  double rel_error = -1.0;  // vs ground truth on the support, when known
};

// CGLS (conjugate gradient on the normal equations, A^T A never formed).
// The residual norm is monotone; an increase beyond roundoff slack aborts.
// Optional ridge term epsilon ||f||^2 (opt-in, reported by the caller).
ReconResult reconstruct(const ForwardOperator& op, const Vec& b, int max_iter,
                        double rtol, const Vec* truth = nullptr,
                        double ridge = 0.0);

// Discrete sigma-nabla: sparse operator from order-(m-1) grid tensors to
// order-m grid tensors (central differences + Christoffel terms at nodes).
Eigen::SparseMatrix<double> potential_operator(const ManifoldModel& M,
                                               const SpatialGrid& grid, int m);

// min_h ||fhat - sigma nabla h|| / ||fhat|| in the Sasaki-weighted discrete
// tensor norm; 0 for fhat = 0 by convention.
double solenoidal_defect(const ManifoldModel& M, const SpatialGrid& grid,
                         const Vec& fhat, int m);

struct KernelScanReport {
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  double ratio = 0.0;  // sigma_min / sigma_max over in-support columns
  int near_kernel_dim = 0;
  // Largest principal angle between the numerical near-kernel and the
  // potential subspace span{sigma nabla h}; meaningful for m >= 1.
  double max_principal_angle_deg = 0.0;
};

// Dense SVD probe of A restricted to columns of nodes inside the support.
KernelScanReport kernel_scan(const ForwardOperator& op);

}  // namespace xrt
