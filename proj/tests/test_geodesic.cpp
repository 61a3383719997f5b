#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "helpers.hpp"
#include "xrt/presets.hpp"

using namespace xrt;
using namespace xrt::testing;

TEST_CASE("euclidean geodesics are straight lines") {
  ManifoldModel M = ManifoldModel::euclidean(2);
  Rng rng(10ull);
  for (int i = 0; i < 5; ++i) {
    SMPoint p(M, rng.in_disk(2.0), rng.direction2());
    GeodesicPath path = integrate_geodesic(M, p, 3.0, 1e-2);
    for (std::size_t k = 0; k < path.size(); k += 50) {
      CHECK((path.xs[k] - (p.x + path.ts[k] * p.v)).norm() < 1e-12);
      CHECK((path.vs[k] - p.v).norm() < 1e-12);
    }
  }
}

TEST_CASE("SMPoint renormalizes to unit g-speed") {
  ManifoldModel M = ManifoldModel::hyperbolic(2, 1.0);
  Vec x(2), v(2);
  x << 1.0, -0.5;
  v << 3.0, 4.0;
  SMPoint p(M, x, v);
  CHECK(M.norm(p.x, p.v) == doctest::Approx(1.0).epsilon(1e-14));
  SMPoint r = p.reversed();
  CHECK((r.v + p.v).norm() < 1e-14);
}

TEST_CASE("hyperbolic distance and right-angle law of cosines") {
  const double K0 = 1.0;
  ManifoldModel M = ManifoldModel::hyperbolic(2, K0);
  Vec a(2), b(2);
  a << 1.0, 0.0;
  b << 0.0, 1.0;
  // radial chart lines are geodesics meeting at a right angle at o:
  // cosh d(a,b) = cosh d(a,o) cosh d(b,o).
  CHECK(distance(M, a, b) ==
        doctest::Approx(std::acosh(std::cosh(1.0) * std::cosh(1.0)))
            .epsilon(1e-7));
  CHECK(distance(M, a, Vec::Zero(2)) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("flow reversibility and drift control") {
  ManifoldModel M = parse_model("powerlaw:1,3");
  Rng rng(11ull);
  for (int i = 0; i < 5; ++i) {
    SMPoint p(M, rng.in_disk(2.0), rng.direction2());
    GeodesicPath fwd = integrate_geodesic(M, p, 5.0, 1e-2);
    CHECK(fwd.max_speed_drift() < 1e-6);
    SMPoint end = fwd.at(fwd.size() - 1);
    SMPoint back = geodesic_flow(M, SMPoint(M, end.x, -end.v), 5.0, 1e-2);
    CHECK((back.x - p.x).norm() < 1e-7);
    CHECK((back.v + p.v).norm() < 1e-7);
  }
}

TEST_CASE("geodesic_flow composes and accepts negative time") {
  ManifoldModel M = ManifoldModel::hyperbolic(2, 2.0);
  Vec x(2), v(2);
  x << 0.4, 0.7;
  v << -1.0, 0.2;
  SMPoint p(M, x, v);
  SMPoint q = geodesic_flow(M, p, 1.3, 1e-3);
  SMPoint back = geodesic_flow(M, q, -1.3, 1e-3);
  CHECK((back.x - p.x).norm() < 1e-9);
  CHECK((back.v - p.v).norm() < 1e-9);
}

TEST_CASE("escaping dichotomy") {
  ManifoldModel M = ManifoldModel::hyperbolic(2, 1.0);
  Rng rng(12ull);
  int nontrivial = 0;
  for (int i = 0; i < 10000; ++i) {
    SMPoint p(M, rng.in_disk(3.0), rng.direction2());
    const bool esc = is_escaping(M, p);
    // sign test: escaping iff the radial speed <x, v>_g is >= 0
    const double radial = M.inner(p.x, p.x, p.v);
    CHECK(esc == (radial >= 0.0));
    if (!esc) {
      ++nontrivial;
      // convexity: every geodesic eventually escapes
      SMPoint later = geodesic_flow(M, p, 2.0 * p.x.norm() + 1.0, 1e-2);
      CHECK(is_escaping(M, later));
    }
  }
  CHECK(nontrivial > 2000);  // the ensemble exercises both branches
}

TEST_CASE("distance lower bounds hold on random geodesics") {
  Rng rng(13ull);
  std::vector<ManifoldModel> models;
  models.push_back(ManifoldModel::hyperbolic(2, 1.0));
  models.push_back(parse_model("powerlaw:1,3"));
  for (const ManifoldModel& M : models) {
    for (int i = 0; i < 30; ++i) {
      SMPoint p(M, rng.in_disk(2.5), rng.direction2());
      DistanceBoundsReport rep = check_distance_bounds(M, p, 8.0);
      CHECK(rep.min_slack_triangle >= -1e-6);
      if (rep.escaping) {
        CHECK(rep.min_slack_escaping >= -1e-6);
        CHECK(rep.min_slack_piecewise >= -1e-6);
      }
    }
  }
}

TEST_CASE("parallel transport preserves the metric") {
  ManifoldModel M = parse_model("powerlaw:2,3");
  Rng rng(14ull);
  for (int i = 0; i < 5; ++i) {
    SMPoint p(M, rng.in_disk(2.0), rng.direction2());
    const Vec w = rng.direction2();
    SMPoint q = parallel_transport_flow(M, p, w, 0.8, 32);
    CHECK(M.norm(q.x, q.v) == doctest::Approx(M.norm(p.x, p.v)).epsilon(1e-8));
  }
}

TEST_CASE("default step overload and CSV output") {
  ManifoldModel M = ManifoldModel::hyperbolic(2, 1.0);
  Vec x(2), v(2);
  x << 0.3, 0.1;
  v << 1.0, 0.0;
  GeodesicPath path = integrate_geodesic(M, SMPoint(M, x, v), 2.0);
  CHECK(path.h == doctest::Approx(std::min(1e-2, 2.0 / 1000.0)));
  const std::string f = "geodesic_out.csv";
  path.save_csv(f);
  std::ifstream in(f);
  std::string line;
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == static_cast<int>(path.size()) + 1);  // header + samples
  std::remove(f.c_str());
}
