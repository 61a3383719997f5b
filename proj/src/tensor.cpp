#include "xrt/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace xrt {

int tensor_component_count(int dim, int order) {
  int c = 1;
  for (int i = 0; i < order; ++i) c *= dim;
  return c;
}

std::vector<int> unflatten_index(int flat, int dim, int order) {
  std::vector<int> idx(order);
  for (int k = 0; k < order; ++k) {
    idx[k] = flat % dim;
    flat /= dim;
  }
  return idx;
}

int flatten_index(const std::vector<int>& idx, int dim) {
  int flat = 0;
  for (int k = static_cast<int>(idx.size()) - 1; k >= 0; --k)
    flat = flat * dim + idx[k];
  return flat;
}

SymmetricTensorField::SymmetricTensorField(int dim, int order, CoeffFn coeff,
                                           DecaySpec decay, DCoeffFn dcoeff)
    : dim_(dim), order_(order), coeff_(std::move(coeff)),
      dcoeff_(std::move(dcoeff)), decay_(decay) {
  if (dim < 2 || order < 0 || order > 4)
    throw std::invalid_argument("SymmetricTensorField: need dim >= 2, 0 <= m <= 4");
}

Mat SymmetricTensorField::component_jacobian(const Vec& x, double fd_step) const {
  if (dcoeff_) return dcoeff_(x);
  const int nc = tensor_component_count(dim_, order_);
  Mat J(nc, dim_);
  for (int k = 0; k < dim_; ++k) {
    Vec xp = x, xm = x;
    xp(k) += fd_step;
    xm(k) -= fd_step;
    J.col(k) = (coeff_(xp) - coeff_(xm)) / (2.0 * fd_step);
  }
  return J;
}

double SymmetricTensorField::asymmetry(const Vec& x) const {
  if (order_ < 2) return 0.0;
  const Vec c = coeff_(x);
  const int nc = tensor_component_count(dim_, order_);
  double worst = 0.0;
  for (int flat = 0; flat < nc; ++flat) {
    std::vector<int> idx = unflatten_index(flat, dim_, order_);
    for (int a = 0; a + 1 < order_; ++a) {
      std::swap(idx[a], idx[a + 1]);
      worst = std::max(worst, std::abs(c(flat) - c(flatten_index(idx, dim_))));
      std::swap(idx[a], idx[a + 1]);
    }
  }
  return worst;
}

double lambda_eval_components(const Vec& comps, int dim, int order, const Vec& v) {
  const int nc = tensor_component_count(dim, order);
  double sum = 0.0;
  for (int flat = 0; flat < nc; ++flat) {
    double mono = comps(flat);
    int rest = flat;
    for (int k = 0; k < order; ++k) {
      mono *= v(rest % dim);
      rest /= dim;
    }
    sum += mono;
  }
  return sum;
}

double lambda_eval(const SymmetricTensorField& f, const Vec& x, const Vec& v) {
  return lambda_eval_components(f.components(x), f.dim(), f.order(), v);
}

Vec symmetrize_components(const Vec& comps, int dim, int order) {
  if (order < 2) return comps;
  const int nc = tensor_component_count(dim, order);
  Vec out = Vec::Zero(nc);
  std::vector<int> perm(order);
  std::iota(perm.begin(), perm.end(), 0);
  int nperm = 0;
  do {
    for (int flat = 0; flat < nc; ++flat) {
      const std::vector<int> idx = unflatten_index(flat, dim, order);
      std::vector<int> pidx(order);
      for (int k = 0; k < order; ++k) pidx[k] = idx[perm[k]];
      out(flat) += comps(flatten_index(pidx, dim));
    }
    ++nperm;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out / static_cast<double>(nperm);
}

SymmetricTensorField symmetrize(const SymmetricTensorField& T) {
  const int dim = T.dim(), order = T.order();
  return SymmetricTensorField(
      dim, order,
      [T, dim, order](const Vec& x) {
        return symmetrize_components(T.components(x), dim, order);
      },
      T.decay());
}

SymmetricTensorField sym_nabla(const ManifoldModel& M,
                               const SymmetricTensorField& h, double fd_step) {
  if (h.dim() != M.dim())
    throw std::invalid_argument("sym_nabla: dimension mismatch");
  const int dim = h.dim();
  const int m = h.order();
  const int out_order = m + 1;
  auto coeff = [&M, h, dim, m, out_order, fd_step](const Vec& x) -> Vec {
    // (nabla h)_{k, i_1..i_m} = d_k h_{i_1..i_m} - sum_j Gamma^l_{k i_j} h_{..l..}
    const Mat dcomp = h.component_jacobian(x, fd_step);
    const Vec comp = h.components(x);
    const std::vector<Mat> G = M.christoffel(x);
    const int nc_out = tensor_component_count(dim, out_order);
    Vec out(nc_out);
    for (int flat = 0; flat < nc_out; ++flat) {
      std::vector<int> idx = unflatten_index(flat, dim, out_order);
      const int k = idx[0];
      std::vector<int> inner(idx.begin() + 1, idx.end());
      double val = dcomp(flatten_index(inner, dim), k);
      for (int j = 0; j < m; ++j) {
        const int ij = inner[j];
        for (int l = 0; l < dim; ++l) {
          std::vector<int> rep = inner;
          rep[j] = l;
          val -= G[l](k, ij) * comp(flatten_index(rep, dim));
        }
      }
      out(flat) = val;
    }
    return symmetrize_components(out, dim, out_order);
  };
  return SymmetricTensorField(dim, out_order, coeff, h.decay());
}

SymmetricTensorField raise_degree(const ManifoldModel& M,
                                  const SymmetricTensorField& F) {
  const int dim = F.dim();
  const int m = F.order();
  const int out_order = m + 2;
  auto coeff = [&M, F, dim, m, out_order](const Vec& x) -> Vec {
    const Vec comp = F.components(x);
    const Mat g = M.metric(x);
    const int nc_out = tensor_component_count(dim, out_order);
    Vec out(nc_out);
    for (int flat = 0; flat < nc_out; ++flat) {
      const std::vector<int> idx = unflatten_index(flat, dim, out_order);
      std::vector<int> head(idx.begin(), idx.begin() + m);
      out(flat) = comp(flatten_index(head, dim)) * g(idx[m], idx[m + 1]);
    }
    return symmetrize_components(out, dim, out_order);
  };
  return SymmetricTensorField(dim, out_order, coeff, F.decay());
}

double tensor_norm(const ManifoldModel& M, const SymmetricTensorField& f,
                   const Vec& x) {
  const int dim = f.dim(), m = f.order();
  const Vec c = f.components(x);
  if (m == 0) return std::abs(c(0));
  const Mat ginv = M.metric_inverse(x);
  const int nc = tensor_component_count(dim, m);
  double sum = 0.0;
  for (int I = 0; I < nc; ++I) {
    for (int J = 0; J < nc; ++J) {
      double w = c(I) * c(J);
      if (w == 0.0) continue;
      int a = I, b = J;
      for (int k = 0; k < m; ++k) {
        w *= ginv(a % dim, b % dim);
        a /= dim;
        b /= dim;
      }
      sum += w;
    }
  }
  return std::sqrt(std::max(0.0, sum));
}

DecayCheckResult decay_check(const ManifoldModel& M,
                             const SymmetricTensorField& f,
                             DecaySpec::Kind kind, double eta,
                             const std::vector<double>& radii, int directions) {
  if (radii.size() < 4)
    throw std::invalid_argument("decay_check: need at least 4 radii");
  std::vector<double> weighted(radii.size(), 0.0);
  const int n = M.dim();
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double r = radii[i];
    for (int d = 0; d < directions; ++d) {
      Vec x = Vec::Zero(n);
      const double a = 2.0 * kPi * d / directions;
      x(0) = r * std::cos(a);
      x(1) = r * std::sin(a);
      const double nrm = tensor_norm(M, f, x);
      const double w = (kind == DecaySpec::Kind::Exponential)
                           ? nrm * std::exp(eta * r)
                           : nrm * std::pow(1.0 + r, eta);
      weighted[i] = std::max(weighted[i], w);
    }
  }
  // Growing monotonically across the last decade of radii means the claimed
  // class does not hold.
  std::size_t tail_start = radii.size();
  for (std::size_t i = radii.size(); i-- > 0;) {
    if (radii[i] >= radii.back() / 10.0) tail_start = i;
  }
  bool monotone_growth = tail_start + 2 < radii.size();
  for (std::size_t i = tail_start + 1; i < radii.size() && monotone_growth; ++i)
    if (weighted[i] <= weighted[i - 1] * (1.0 + 1e-9)) monotone_growth = false;
  const double fitted = *std::max_element(weighted.begin(), weighted.end());
  return {!monotone_growth, fitted};
}

}  // namespace xrt
