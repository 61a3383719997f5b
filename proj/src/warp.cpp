#include "xrt/warp.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace xrt {

WarpedProfile::WarpedProfile(double r_max, double step, std::vector<double> f,
                             std::vector<double> df, std::vector<double> ddf)
    : r_max_(r_max), step_(step), f_(std::move(f)), df_(std::move(df)),
      ddf_(std::move(ddf)) {
  validate();
  // -f''/f tends to -f'''(0) as r -> 0; quadratic extrapolation through the
  // first three interior nodes gives an O(step^3) estimate.
  if (f_.size() >= 4) {
    const double k1 = -ddf_[1] / f_[1];
    const double k2 = -ddf_[2] / f_[2];
    const double k3 = -ddf_[3] / f_[3];
    k0_ = 3.0 * k1 - 3.0 * k2 + k3;
  } else {
    k0_ = -ddf_[1] / f_[1];
  }
}

void WarpedProfile::validate() const {
  if (r_max_ <= 0 || step_ <= 0) throw std::invalid_argument("warp: bad grid");
  const std::size_t n = static_cast<std::size_t>(std::llround(r_max_ / step_)) + 1;
  if (f_.size() != n || df_.size() != n || ddf_.size() != n)
    throw std::invalid_argument("warp: sample count mismatch");
  if (std::abs(f_[0]) > 1e-12 || std::abs(df_[0] - 1.0) > 1e-12)
    throw std::invalid_argument("warp: f(0)=0, f'(0)=1 required");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(f_[i] > 0)) throw std::invalid_argument("warp: f must be positive for r>0");
    if (ddf_[i] < -1e-10) throw std::invalid_argument("warp: f'' < 0 (positive curvature)");
  }
}

WarpEval WarpedProfile::eval(double r) const {
  if (r < 0) throw std::invalid_argument("warp: negative radius");
  if (r >= r_max_) {
    // Linear continuation beyond the sampled range; callers are expected to
    // size r_max past the region of interest.
    const double f_end = f_.back(), df_end = df_.back();
    return {f_end + df_end * (r - r_max_), df_end, 0.0};
  }
  const std::size_t i = static_cast<std::size_t>(r / step_);
  const double t = (r - static_cast<double>(i) * step_) / step_;
  const double h = step_;
  auto hermite = [&](double y0, double y1, double m0, double m1, double& val,
                     double& der) {
    const double t2 = t * t, t3 = t2 * t;
    val = (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * m0 +
          (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * m1;
    der = ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * h * m0 +
           (-6 * t2 + 6 * t) * y1 + (3 * t2 - 2 * t) * h * m1) /
          h;
  };
  WarpEval out{};
  double der_unused;
  hermite(f_[i], f_[i + 1], df_[i], df_[i + 1], out.f, der_unused);
  hermite(df_[i], df_[i + 1], ddf_[i], ddf_[i + 1], out.df, out.ddf);
  return out;
}

double WarpedProfile::curvature(double r) const {
  if (r < step_) return k0_;
  const WarpEval w = eval(r);
  return -w.ddf / w.f;
}

void WarpedProfile::save_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("warp: cannot open " + path);
  out << "r,f,fp,fpp\r\n";
  char buf[160];
  for (std::size_t i = 0; i < f_.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\r\n",
                  static_cast<double>(i) * step_, f_[i], df_[i], ddf_[i]);
    out << buf;
  }
}

WarpedProfile WarpedProfile::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("warp: cannot open " + path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<double> r, f, df, ddf;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    double vals[4];
    char comma;
    ss >> vals[0] >> comma >> vals[1] >> comma >> vals[2] >> comma >> vals[3];
    r.push_back(vals[0]);
    f.push_back(vals[1]);
    df.push_back(vals[2]);
    ddf.push_back(vals[3]);
  }
  if (r.size() < 2) throw std::runtime_error("warp: too few samples in " + path);
  const double step = r[1] - r[0];
  return WarpedProfile(r.back(), step, std::move(f), std::move(df), std::move(ddf));
}

WarpedProfile profile_from_curvature(const std::function<double(double)>& k,
                                     double r_max, double step) {
  if (r_max <= 0 || step <= 0 || step > 1e-3 * r_max + 1e-15)
    throw std::invalid_argument("profile_from_curvature: step must be <= 1e-3 * r_max");
  const std::size_t n = static_cast<std::size_t>(std::llround(r_max / step));
  std::vector<double> f(n + 1), df(n + 1), ddf(n + 1);
  auto rate = [&](double r, double y, double yp, double& dy, double& dyp) {
    const double kr = k(r);
    if (kr > 1e-12)
      throw std::invalid_argument("profile_from_curvature: positive curvature sample");
    dy = yp;
    dyp = -kr * y;
  };
  double y = 0.0, yp = 1.0;
  f[0] = y;
  df[0] = yp;
  ddf[0] = -k(0.0) * y;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = static_cast<double>(i) * step;
    double k1y, k1p, k2y, k2p, k3y, k3p, k4y, k4p;
    rate(r, y, yp, k1y, k1p);
    rate(r + step / 2, y + step / 2 * k1y, yp + step / 2 * k1p, k2y, k2p);
    rate(r + step / 2, y + step / 2 * k2y, yp + step / 2 * k2p, k3y, k3p);
    rate(r + step, y + step * k3y, yp + step * k3p, k4y, k4p);
    y += step / 6 * (k1y + 2 * k2y + 2 * k3y + k4y);
    yp += step / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
    f[i + 1] = y;
    df[i + 1] = yp;
    ddf[i + 1] = -k(static_cast<double>(i + 1) * step) * y;
  }
  return WarpedProfile(static_cast<double>(n) * step, step, std::move(f),
                       std::move(df), std::move(ddf));
}

}  // namespace xrt
