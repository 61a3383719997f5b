// xrt command line: geodesic | jacobi | transform | harmonics | reconstruct |
// verify-all. One run per process; every artifact is written atomically
// (temp + rename) and each run produces a report.json with the resolved
// config, library versions, and timings.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "xrt/jacobi.hpp"
#include "xrt/presets.hpp"
#include "xrt/recon.hpp"
#include "xrt/rng.hpp"

using json = nlohmann::json;
using namespace xrt;
using clk = std::chrono::steady_clock;

namespace {

constexpr char kVersion[] = "0.1.0";

// --- atomic file output ---

void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + tmp);
    out << content;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot rename " + tmp + " -> " + path);
}

// RFC-4180 CSV: CRLF rows, '.' decimal (printf "C" formatting of doubles).
class Csv {
 public:
  explicit Csv(std::vector<std::string> header) {
    for (std::size_t i = 0; i < header.size(); ++i)
      body_ += (i ? "," : "") + header[i];
    body_ += "\r\n";
  }
  void row(const std::vector<double>& vals) {
    char buf[64];
    for (std::size_t i = 0; i < vals.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", vals[i]);
      body_ += (i ? "," : "") + std::string(buf);
    }
    body_ += "\r\n";
  }
  void raw_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      body_ += (i ? "," : "") + cells[i];
    body_ += "\r\n";
  }
  void save(const std::string& path) const { atomic_write(path, body_); }

 private:
  std::string body_;
};

// --- config plumbing ---

// Every CLI option doubles as a config-file key; file values fill options the
// command line left untouched, unknown keys are rejected.
struct Binding {
  std::string key;
  CLI::Option* opt = nullptr;
  std::function<void(const json&)> set;
  std::function<json()> get;
};

struct Ctx {
  CLI::App* sub = nullptr;
  std::string config_path;
  std::vector<Binding> bindings;

  void opt_double(const std::string& key, double& var, const std::string& help) {
    Binding b{key, sub->add_option("--" + key, var, help),
              [&var](const json& j) { var = j.get<double>(); },
              [&var] { return json(var); }};
    bindings.push_back(std::move(b));
  }
  void opt_int(const std::string& key, int& var, const std::string& help) {
    Binding b{key, sub->add_option("--" + key, var, help),
              [&var](const json& j) { var = j.get<int>(); },
              [&var] { return json(var); }};
    bindings.push_back(std::move(b));
  }
  void opt_u64(const std::string& key, std::uint64_t& var,
               const std::string& help) {
    Binding b{key, sub->add_option("--" + key, var, help),
              [&var](const json& j) { var = j.get<std::uint64_t>(); },
              [&var] { return json(var); }};
    bindings.push_back(std::move(b));
  }
  void opt_str(const std::string& key, std::string& var,
               const std::string& help) {
    Binding b{key, sub->add_option("--" + key, var, help),
              [&var](const json& j) { var = j.get<std::string>(); },
              [&var] { return json(var); }};
    bindings.push_back(std::move(b));
  }

  void resolve() {
    if (config_path.empty()) return;
    std::ifstream in(config_path);
    if (!in) throw std::invalid_argument("config: cannot open " + config_path);
    json cfg;
    try {
      in >> cfg;
    } catch (const json::exception& e) {
      throw std::invalid_argument(std::string("config: parse error: ") + e.what());
    }
    if (!cfg.is_object())
      throw std::invalid_argument("config: top level must be an object");
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
      const Binding* hit = nullptr;
      for (const Binding& b : bindings)
        if (b.key == it.key()) hit = &b;
      if (!hit)
        throw std::invalid_argument("config: unknown key '" + it.key() + "'");
      if (hit->opt->count() == 0) {
        try {
          hit->set(it.value());
        } catch (const json::exception&) {
          throw std::invalid_argument("config: bad value for '" + it.key() + "'");
        }
      }
    }
  }

  json echo() const {
    json out = json::object();
    for (const Binding& b : bindings) out[b.key] = b.get();
    return out;
  }
};

void require_dir(const std::string& path) {
  std::error_code ec;
  if (!std::filesystem::is_directory(path, ec))
    throw std::invalid_argument("out: not a directory: " + path);
}

void write_report(const std::string& outdir, const std::string& sub,
                  const json& config, const json& results, double seconds) {
  json rep;
  rep["tool"] = "xrt";
  rep["version"] = kVersion;
  rep["subcommand"] = sub;
  rep["config"] = config;
  rep["results"] = results;
  rep["versions"] = {{"xrt", kVersion},
                     {"cli11", CLI11_VERSION},
                     {"nlohmann_json", "3.11.3"},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                   std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                   std::to_string(EIGEN_MINOR_VERSION)}};
  rep["timings"] = {{"total_s", seconds}};
  atomic_write(outdir + "/report.json", rep.dump(2) + "\n");
}

std::vector<SMPoint> parse_seeds(const ManifoldModel& M, const std::string& spec,
                                 std::uint64_t rng_seed) {
  std::vector<SMPoint> out;
  if (spec.rfind("random:", 0) == 0) {
    int n = 0;
    double radius = 0.0;
    if (std::sscanf(spec.c_str(), "random:%d:%lf", &n, &radius) != 2 || n <= 0 ||
        radius <= 0)
      throw std::invalid_argument("seeds: expected random:N:radius");
    Rng rng(rng_seed);
    for (int i = 0; i < n; ++i)
      out.emplace_back(M, rng.in_disk(radius), rng.direction2());
    return out;
  }
  std::ifstream in(spec);
  if (!in) throw std::invalid_argument("seeds: cannot open " + spec);
  std::string line;
  std::getline(in, line);  // header x,y,vx,vy
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double c[4];
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &c[0], &c[1], &c[2],
                    &c[3]) != 4)
      throw std::invalid_argument("seeds: bad row '" + line + "'");
    Vec x(2), v(2);
    x << c[0], c[1];
    v << c[2], c[3];
    out.emplace_back(M, x, v);
  }
  if (out.empty()) throw std::invalid_argument("seeds: no rows in " + spec);
  return out;
}

// --- subcommands ---

int run_geodesic(const Ctx& ctx, const std::string& model,
                 const std::string& out, double x, double y, double vx,
                 double vy, double T, double step) {
  auto t0 = clk::now();
  ManifoldModel M = parse_model(model);
  Vec px(2), pv(2);
  px << x, y;
  pv << vx, vy;
  SMPoint p(M, px, pv);
  GeodesicPath path = integrate_geodesic(M, p, T, step);
  const std::string tmp = out + "/geodesic.csv.tmp";
  path.save_csv(tmp);
  if (std::rename(tmp.c_str(), (out + "/geodesic.csv").c_str()) != 0)
    throw std::runtime_error("cannot rename " + tmp);
  DistanceBoundsReport rep = check_distance_bounds(M, p, T);
  json results = {{"samples", path.size()},
                  {"max_speed_drift", path.max_speed_drift()},
                  {"escaping", rep.escaping},
                  {"min_slack_triangle", rep.min_slack_triangle},
                  {"end", {path.xs.back()(0), path.xs.back()(1)}}};
  write_report(out, "geodesic", ctx.echo(), results,
               std::chrono::duration<double>(clk::now() - t0).count());
  return 0;
}

int run_jacobi(const Ctx& ctx, const std::string& model, const std::string& out,
               double x, double y, double vx, double vy, double T, double step,
               const std::string& init) {
  auto t0 = clk::now();
  if (init != "v" && init != "h")
    throw std::invalid_argument("jacobi: --init must be v or h");
  ManifoldModel M = parse_model(model);
  Vec px(2), pv(2), w(1);
  px << x, y;
  pv << vx, vy;
  w << 1.0;
  JacobiField J = solve_jacobi(M, SMPoint(M, px, pv), T, step,
                               init == "v" ? JacobiInit::VType : JacobiInit::HType,
                               w);
  Csv csv({"t", "J_norm", "DtJ_norm"});
  for (std::size_t i = 0; i < J.size(); ++i)
    csv.row({J.t(i), J.J_norm(i), J.DtJ_norm(i)});
  csv.save(out + "/jacobi.csv");
  json results = {{"rauch_slack", check_rauch_bound(J, M.sup_kappa())},
                  {"frame_defect", J.frame.orthonormality_defect()},
                  {"J_end", J.J_norm(J.size() - 1)}};
  write_report(out, "jacobi", ctx.echo(), results,
               std::chrono::duration<double>(clk::now() - t0).count());
  return 0;
}

int run_transform(const Ctx& ctx, const std::string& model,
                  const std::string& out, const std::string& field,
                  const std::string& seeds_spec, std::uint64_t seed, double tol,
                  double step, double max_horizon) {
  auto t0 = clk::now();
  ManifoldModel M = parse_model(model);
  SymmetricTensorField f = parse_field(M, field);
  auto seeds = parse_seeds(M, seeds_spec, seed);
  XrayOptions opt;
  opt.tol = tol;
  opt.step = step;
  opt.max_horizon = max_horizon;
  Csv csv({"x", "y", "vx", "vy", "value", "tail_bound", "horizon"});
  double max_abs = 0.0, max_tail = 0.0;
  for (const SMPoint& p : seeds) {
    TransformSample s = xray_transform(M, f, p, opt);
    csv.row({p.x(0), p.x(1), p.v(0), p.v(1), s.value, s.tail_bound, s.horizon});
    max_abs = std::max(max_abs, std::abs(s.value));
    max_tail = std::max(max_tail, s.tail_bound);
  }
  csv.save(out + "/transform.csv");
  json results = {{"count", seeds.size()},
                  {"order", f.order()},
                  {"max_abs_value", max_abs},
                  {"max_tail_bound", max_tail}};
  write_report(out, "transform", ctx.echo(), results,
               std::chrono::duration<double>(clk::now() - t0).count());
  return 0;
}

int run_harmonics(const Ctx& ctx, const std::string& model,
                  const std::string& out, const std::string& field, int kmax,
                  int ntheta, int grid_n, double extent,
                  const std::string& check) {
  auto t0 = clk::now();
  ManifoldModel M = parse_model(model);
  SymmetricTensorField f = parse_field(M, field);
  if (f.decay().kind != DecaySpec::Kind::Compact)
    throw std::invalid_argument("harmonics: field preset must be compactly supported");
  const double Rs = f.decay().support_radius;
  SpatialGrid grid = SpatialGrid::centered(extent, grid_n);
  SMGridFunction u = sample_tensor(M, grid, ntheta, f, Rs);
  FourierModes m = vertical_fourier(u, kmax);

  Csv csv({"k", "mode_norm", "contraction_ratio", "skipped"});
  auto ratios = contraction_check(M, m, kmax - 1);
  for (int k = 0; k <= kmax; ++k) {
    const double nk = modes_norm(M, mode_select(m, k));
    double ratio = 0.0, skipped = 1.0;
    for (const ContractionRatio& cr : ratios)
      if (cr.k == k) {
        ratio = cr.ratio;
        skipped = cr.skipped ? 1.0 : 0.0;
      }
    csv.row({static_cast<double>(k), nk, ratio, skipped});
  }
  csv.save(out + "/harmonics.csv");

  json results = {{"aliased_fraction", m.aliased_fraction},
                  {"order", f.order()}};
  if (check == "eigen" || check == "all") {
    double eig = 0.0;
    for (int k = 1; k <= kmax; ++k) {
      SMGridFunction uk = synthesize(mode_select(m, k), ntheta);
      const double n = uk.values().norm();
      if (n < 1e-12) continue;
      eig = std::max(eig, (vertical_laplacian(uk).values() -
                           static_cast<double>(k) * k * uk.values())
                              .norm() /
                              (k * k * n));
    }
    results["eigen_rel_err"] = eig;
  }
  if (check == "contraction" || check == "all") {
    double worst = 0.0;
    for (const ContractionRatio& cr : ratios)
      if (!cr.skipped) worst = std::max(worst, cr.ratio);
    results["max_contraction_ratio"] = worst;
  }
  if (check == "splitting" || check == "all")
    results["splitting_slack"] = norm_splitting_check(M, m);
  if (check == "recursion" || check == "all") {
    // an order-m field occupies modes |k| <= m only, so the transport
    // recursion at k > m involves empty modes and must vanish
    double worst = 0.0;
    for (int k = f.order() + 1; k + 2 <= kmax; ++k)
      worst = std::max(worst, recursion_defect(M, m, k));
    results["max_recursion_defect"] = worst;
  }
  if (results.size() == 2)
    throw std::invalid_argument(
        "harmonics: --check must be eigen|contraction|splitting|recursion|all");
  write_report(out, "harmonics", ctx.echo(), results,
               std::chrono::duration<double>(clk::now() - t0).count());
  return 0;
}

int run_reconstruct(const Ctx& ctx, const std::string& model,
                    const std::string& out, const std::string& field,
                    int grid_n, double extent, double support_radius,
                    int nseeds, std::uint64_t seed, int max_iter, double rtol,
                    double ridge) {
  auto t0 = clk::now();
  ManifoldModel M = parse_model(model);
  SymmetricTensorField f = parse_field(M, field);
  const int m = f.order();
  SpatialGrid grid = SpatialGrid::centered(extent, grid_n);
  Rng rng(seed);
  std::vector<SMPoint> seeds;
  for (int i = 0; i < nseeds; ++i)
    seeds.emplace_back(M, rng.in_disk(1.5 * support_radius), rng.direction2());
  ForwardOperator op = assemble_forward(M, grid, seeds, m, support_radius);
  const Vec ftrue = discretize(grid, f);
  ReconResult r = reconstruct(op, Vec(op.A * ftrue), max_iter, rtol, &ftrue,
                              ridge);
  Csv csv([&] {
    std::vector<std::string> h{"x", "y"};
    for (int j = 0; j <= m; ++j) h.push_back("c" + std::to_string(j));
    return h;
  }());
  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix) {
      const Vec x = grid.node(ix, iy);
      std::vector<double> row{x(0), x(1)};
      for (int j = 0; j <= m; ++j)
        row.push_back(r.fhat(j * grid.nodes() + grid.index(ix, iy)));
      csv.row(row);
    }
  csv.save(out + "/reconstruction.csv");
  json results = {{"order", m},
                  {"iterations", r.iterations},
                  {"rel_residual", r.rel_residual},
                  {"rel_error", r.rel_error},
                  {"empty_rows", op.empty_rows.size()}};
  if (m >= 1)
    results["solenoidal_defect"] = solenoidal_defect(M, grid, r.fhat, m);
  write_report(out, "reconstruct", ctx.echo(), results,
               std::chrono::duration<double>(clk::now() - t0).count());
  return 0;
}

int run_verify_all(const Ctx& ctx, const std::string& model,
                   const std::string& out, std::uint64_t seed) {
  auto t0 = clk::now();
  ManifoldModel M = parse_model(model);
  Rng rng(seed);
  json results = json::object();
  Csv csv({"check", "metric", "threshold", "pass"});
  int failures = 0;
  auto record = [&](const std::string& name, double metric, double threshold,
                    bool pass) {
    char m1[32], m2[32];
    std::snprintf(m1, sizeof m1, "%.6g", metric);
    std::snprintf(m2, sizeof m2, "%.6g", threshold);
    csv.raw_row({name, m1, m2, pass ? "1" : "0"});
    results[name] = {{"metric", metric}, {"pass", pass}};
    if (!pass) ++failures;
  };

  {  // distance lower bounds, escaping and triangle
    double min_slack = 1e300;
    for (int i = 0; i < 100; ++i) {
      SMPoint p(M, rng.in_disk(2.0), rng.direction2());
      DistanceBoundsReport rep = check_distance_bounds(M, p, 8.0);
      min_slack = std::min(min_slack, rep.min_slack_triangle);
      if (rep.escaping) min_slack = std::min(min_slack, rep.min_slack_escaping);
    }
    record("distance_bounds_min_slack", min_slack, -1e-6, min_slack >= -1e-6);
  }
  {  // Rauch comparison
    Vec w(1);
    w << 1.0;
    // any K0 >= sup |K| gives a valid Rauch bound; keep it positive for flat
    const double K0 = std::max(M.sup_kappa(), 1e-9);
    double min_slack = 1e300;
    for (int i = 0; i < 20; ++i) {
      SMPoint p(M, rng.in_disk(2.0), rng.direction2());
      const JacobiInit init = i % 2 ? JacobiInit::HType : JacobiInit::VType;
      min_slack = std::min(
          min_slack, check_rauch_bound(solve_jacobi(M, p, 6.0, 1e-2, init, w), K0));
    }
    record("rauch_min_slack", min_slack, -1e-6, min_slack >= -1e-6);
  }
  {  // Gronwall / linear growth along escaping geodesics
    Vec w(1);
    w << 1.0;
    double worst = 0.0;
    int found = 0;
    while (found < 10) {
      SMPoint p(M, rng.in_disk(2.0), rng.direction2());
      if (!is_escaping(M, p)) continue;
      ++found;
      JacobiField J = solve_jacobi(M, p, 20.0, 1e-2, JacobiInit::VType, w);
      worst = std::max(worst, check_gronwall_bound(J, M, 1.0).linear_growth_ratio);
    }
    record("gronwall_growth_ratio", worst, 1.0, worst <= 1.0);
  }
  {  // sphere volume dominates the flat one (K <= 0)
    double min_slack = 1e300;
    for (double r = 0.5; r <= 8.0; r += 0.5)
      min_slack = std::min(min_slack, M.sphere_volume(r) - 2.0 * kPi * r);
    record("sphere_volume_vs_flat", min_slack, -1e-9, min_slack >= -1e-9);
  }
  {  // transport identity on a potential
    SymmetricTensorField f = parse_field(M, "potential:bump");
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      SMPoint p(M, rng.in_disk(1.0), rng.direction2());
      worst = std::max(worst, transport_residual(M, f, p, 1e-3));
    }
    record("transport_residual", worst, 1e-4, worst <= 1e-4);
  }
  {  // kernel identity I_1(sigma nabla h) = 0
    SymmetricTensorField f = parse_field(M, "potential:bump");
    XrayOptions opt;
    opt.step = 2.5e-3;
    std::vector<SMPoint> seeds;
    for (int i = 0; i < 50; ++i)
      seeds.emplace_back(M, rng.in_disk(1.5), rng.direction2());
    const double probe = kernel_probe(M, f, seeds, opt);
    record("kernel_probe", probe, 1e-6, probe <= 1e-6);
  }
  {  // spectral identities and contraction on the circle bundle
    SpatialGrid grid = SpatialGrid::centered(1.8, 48);
    SymmetricTensorField env = smooth_bump(2, Vec::Zero(2), 1.1, 0, Vec::Ones(2));
    const double a1 = rng.uniform(-1, 1), a2 = rng.uniform(-1, 1);
    const double p1 = rng.angle(), p2 = rng.angle();
    SMGridFunction u(grid, 32, 1.1);
    for (int node = 0; node < grid.nodes(); ++node) {
      const Vec x = grid.node(node % grid.nx, node / grid.nx);
      const double e = env.components(x)(0);
      for (int j = 0; j < 32; ++j)
        u.at(node, j) = e * (1.0 + a1 * std::cos(u.theta(j) + p1) +
                             a2 * std::cos(3 * u.theta(j) + p2));
    }
    FourierModes m = vertical_fourier(u, 4);
    double eig = 0.0;
    for (int k = 1; k <= 4; ++k) {
      SMGridFunction uk = synthesize(mode_select(m, k), 32);
      const double n = uk.values().norm();
      if (n < 1e-12) continue;
      eig = std::max(eig, (vertical_laplacian(uk).values() -
                           static_cast<double>(k) * k * uk.values())
                              .norm() /
                              (k * k * n));
    }
    record("vertical_eigen_rel_err", eig, 1e-10, eig <= 1e-10);
    double worst1 = 0.0, worst2 = 0.0;
    for (const ContractionRatio& cr : contraction_check(M, m, 3)) {
      if (cr.skipped) continue;
      (cr.k == 1 ? worst1 : worst2) = std::max(cr.k == 1 ? worst1 : worst2,
                                               cr.ratio);
    }
    record("contraction_k1", worst1, std::sqrt(2.0) + 5e-3,
           worst1 <= std::sqrt(2.0) + 5e-3);
    record("contraction_k2plus", worst2, 1.0 + 5e-3, worst2 <= 1.0 + 5e-3);
  }

  csv.save(out + "/verify.csv");
  results["failures"] = failures;
  write_report(out, "verify-all", ctx.echo(), results,
               std::chrono::duration<double>(clk::now() - t0).count());
  if (failures > 0)
    throw std::runtime_error("verify-all: " + std::to_string(failures) +
                             " checks failed (see verify.csv)");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geodesic X-ray transform toolkit"};
  app.require_subcommand(1);

  struct Common {
    std::string model = "hyperbolic:1";
    std::string out = ".";
    std::uint64_t seed = 1;
  };

  // geodesic
  Ctx g;
  Common gc;
  double gx = 0.3, gy = 0.1, gvx = 1.0, gvy = 0.0, gT = 5.0, gstep = 1e-2;
  g.sub = app.add_subcommand("geodesic", "integrate one geodesic to CSV");
  g.sub->add_option("--config", g.config_path, "JSON config file");
  g.opt_str("model", gc.model, "model preset");
  g.opt_str("out", gc.out, "output directory");
  g.opt_double("x", gx, "start x");
  g.opt_double("y", gy, "start y");
  g.opt_double("vx", gvx, "direction x");
  g.opt_double("vy", gvy, "direction y");
  g.opt_double("T", gT, "flow time");
  g.opt_double("step", gstep, "RK4 step");

  // jacobi
  Ctx j;
  Common jc;
  double jx = 0.3, jy = 0.1, jvx = 1.0, jvy = 0.0, jT = 8.0, jstep = 1e-2;
  std::string jinit = "v";
  j.sub = app.add_subcommand("jacobi", "solve a normal Jacobi field");
  j.sub->add_option("--config", j.config_path, "JSON config file");
  j.opt_str("model", jc.model, "model preset");
  j.opt_str("out", jc.out, "output directory");
  j.opt_double("x", jx, "start x");
  j.opt_double("y", jy, "start y");
  j.opt_double("vx", jvx, "direction x");
  j.opt_double("vy", jvy, "direction y");
  j.opt_double("T", jT, "flow time");
  j.opt_double("step", jstep, "RK4 step");
  j.opt_str("init", jinit, "initial data: v (J=0) or h (DtJ=0)");

  // transform
  Ctx t;
  Common tc;
  std::string tfield = "gaussian", tseeds = "random:100:2";
  double ttol = 1e-8, tstep = 1e-2, tmaxh = 200.0;
  t.sub = app.add_subcommand("transform", "geodesic X-ray transform samples");
  t.sub->add_option("--config", t.config_path, "JSON config file");
  t.opt_str("model", tc.model, "model preset");
  t.opt_str("out", tc.out, "output directory");
  t.opt_str("field", tfield, "field preset");
  t.opt_str("seeds", tseeds, "random:N:radius or CSV file");
  t.opt_u64("seed", tc.seed, "RNG seed");
  t.opt_double("tol", ttol, "truncation tolerance");
  t.opt_double("step", tstep, "quadrature step");
  t.opt_double("max-horizon", tmaxh, "hard cap on the per-ray horizon");

  // harmonics
  Ctx h;
  Common hc;
  std::string hfield = "bump", hcheck = "all";
  int hkmax = 4, hntheta = 32, hgrid = 48;
  double hextent = 1.8;
  h.sub = app.add_subcommand("harmonics", "vertical Fourier analysis on SM");
  h.sub->add_option("--config", h.config_path, "JSON config file");
  h.opt_str("model", hc.model, "model preset");
  h.opt_str("out", hc.out, "output directory");
  h.opt_str("field", hfield, "compactly supported field preset");
  h.opt_int("kmax", hkmax, "vertical band limit");
  h.opt_int("ntheta", hntheta, "fiber samples");
  h.opt_int("grid-n", hgrid, "spatial grid nodes per side");
  h.opt_double("extent", hextent, "grid half extent");
  h.opt_str("check", hcheck, "eigen|contraction|splitting|recursion|all");

  // reconstruct
  Ctx r;
  Common rc;
  std::string rfield = "gaussian:0.3,0.2,0.3";
  int rgrid = 32, rnseeds = 1000, rmaxit = 1000;
  double rextent = 1.8, rsupport = 1.3, rrtol = 1e-6, rridge = 0.0;
  r.sub = app.add_subcommand("reconstruct", "iterative least-squares inversion");
  r.sub->add_option("--config", r.config_path, "JSON config file");
  r.opt_str("model", rc.model, "model preset");
  r.opt_str("out", rc.out, "output directory");
  r.opt_str("field", rfield, "ground-truth field preset");
  r.opt_int("grid-n", rgrid, "grid nodes per side");
  r.opt_double("extent", rextent, "grid half extent");
  r.opt_double("support-radius", rsupport, "reconstruction support radius");
  r.opt_int("nseeds", rnseeds, "number of random geodesics");
  r.opt_u64("seed", rc.seed, "RNG seed");
  r.opt_int("max-iter", rmaxit, "CGLS iteration cap");
  r.opt_double("rtol", rrtol, "relative residual target");
  r.opt_double("ridge", rridge, "optional ridge term");

  // verify-all
  Ctx v;
  Common vc;
  v.sub = app.add_subcommand("verify-all", "run every lemma check");
  v.sub->add_option("--config", v.config_path, "JSON config file");
  v.opt_str("model", vc.model, "model preset");
  v.opt_str("out", vc.out, "output directory");
  v.opt_u64("seed", vc.seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  std::string outdir = ".";
  try {
    if (g.sub->parsed()) {
      g.resolve();
      outdir = gc.out;
      require_dir(outdir);
      return run_geodesic(g, gc.model, gc.out, gx, gy, gvx, gvy, gT, gstep);
    }
    if (j.sub->parsed()) {
      j.resolve();
      outdir = jc.out;
      require_dir(outdir);
      return run_jacobi(j, jc.model, jc.out, jx, jy, jvx, jvy, jT, jstep, jinit);
    }
    if (t.sub->parsed()) {
      t.resolve();
      outdir = tc.out;
      require_dir(outdir);
      return run_transform(t, tc.model, tc.out, tfield, tseeds, tc.seed, ttol,
                           tstep, tmaxh);
    }
    if (h.sub->parsed()) {
      h.resolve();
      outdir = hc.out;
      require_dir(outdir);
      return run_harmonics(h, hc.model, hc.out, hfield, hkmax, hntheta, hgrid,
                           hextent, hcheck);
    }
    if (r.sub->parsed()) {
      r.resolve();
      outdir = rc.out;
      require_dir(outdir);
      return run_reconstruct(r, rc.model, rc.out, rfield, rgrid, rextent,
                             rsupport, rnseeds, rc.seed, rmaxit, rrtol, rridge);
    }
    if (v.sub->parsed()) {
      v.resolve();
      outdir = vc.out;
      require_dir(outdir);
      return run_verify_all(v, vc.model, vc.out, vc.seed);
    }
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    try {
      json diag = {{"error", e.what()}, {"tool", "xrt"}, {"version", kVersion}};
      atomic_write(outdir + "/diagnostics.json", diag.dump(2) + "\n");
    } catch (...) {
      // diagnostics are best effort
    }
    return 2;
  }
  return 1;
}
