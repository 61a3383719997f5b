#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "helpers.hpp"
#include "xrt/presets.hpp"
#include "xrt/xray.hpp"

using namespace xrt;
using namespace xrt::testing;

TEST_CASE("euclidean gaussian line integral matches the closed form") {
  ManifoldModel M = ManifoldModel::euclidean(2);
  // width 1/sqrt(2) makes the profile e^{-|x|^2}
  SymmetricTensorField f = parse_field(M, "gaussian:0,0,0.70710678118654752");
  Vec x(2), v(2);
  x << 0.0, 1.0;
  v << 1.0, 0.0;
  TransformSample s = xray_transform(M, f, SMPoint(M, x, v));
  CHECK(std::abs(s.value - fx::kGaussLine) < fx::kGaussLineTol);
  CHECK(s.tail_bound <= XrayOptions{}.tol);
}

TEST_CASE("transform is linear") {
  ManifoldModel M = ManifoldModel::hyperbolic(2, 1.0);
  SymmetricTensorField f1 = parse_field(M, "bump:0.3,0.0,0.8");
  SymmetricTensorField f2 = parse_field(M, "bump:-0.2,0.4,0.9");
  auto sum = [f1, f2](const Vec& x) {
    return Vec(f1.components(x) + f2.components(x));
  };
  SymmetricTensorField fs(2, 0, sum, DecaySpec::compact(1.3));
  Rng rng(40ull);
  for (int i = 0; i < 5; ++i) {
    SMPoint p(M, rng.in_disk(1.0), rng.direction2());
    const double lhs = xray_transform(M, fs, p).value;
    const double rhs =
        xray_transform(M, f1, p).value + xray_transform(M, f2, p).value;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("reversal parity (-1)^m") {
  ManifoldModel M = ManifoldModel::hyperbolic(2, 1.0);
  Rng rng(41ull);
  for (const char* spec : {"bump:0.1,0.2,1.0", "bump1:0.1,0.2,1.0"}) {
    SymmetricTensorField f = parse_field(M, spec);
    const double sign = (f.order() % 2 == 0) ? 1.0 : -1.0;
    for (int i = 0; i < 4; ++i) {
      SMPoint p(M, rng.in_disk(1.0), rng.direction2());
      const double fwd = xray_transform(M, f, p).value;
      const double bwd = xray_transform(M, f, p.reversed()).value;
      CHECK(bwd == doctest::Approx(sign * fwd).epsilon(1e-9));
    }
  }
}

TEST_CASE("tail bound is certified against a longer integration") {
  ManifoldModel M = ManifoldModel::hyperbolic(2, 1.0);
  SymmetricTensorField f = parse_field(M, "gaussian:0.2,0.1,0.4");
  Rng rng(42ull);
  XrayOptions opt;
  opt.tol = 1e-6;  // keeps the continued ray inside the well-conditioned range
  for (int i = 0; i < 5; ++i) {
    SMPoint p(M, rng.in_disk(1.0), rng.direction2());
    TransformSample s = uf(M, f, p, opt);
    CHECK(s.tail_bound <= opt.tol);
    // the remaining integral past the realized horizon must not exceed the
    // certificate
    SMPoint at_stop = geodesic_flow(M, p, s.horizon, 1e-2);
    GeodesicPath rest = integrate_geodesic(M, at_stop, 5.0, 1e-3);
    double remainder = 0.0;
    for (std::size_t k = 0; k + 1 < rest.size(); ++k)
      remainder += std::abs(lambda_eval(f, rest.xs[k], rest.vs[k])) * rest.h;
    CHECK(remainder <= s.tail_bound * (1.0 + 1e-6) + 1e-15);
  }
}

TEST_CASE("decay class validation") {
  ManifoldModel M = ManifoldModel::euclidean(2);
  auto c = [](const Vec& x) {
    Vec v(1);
    v << std::exp(-x.squaredNorm());
    return v;
  };
  Vec x(2), v(2);
  x << 0.0, 0.5;
  v << 1.0, 0.0;
  SMPoint p(M, x, v);
  SymmetricTensorField none(2, 0, c);  // no decay class attached
  CHECK_THROWS_AS(uf(M, none, p), std::invalid_argument);
  SymmetricTensorField p1(2, 0, c, DecaySpec::polynomial(1.0, 1.0));
  CHECK_THROWS_AS(uf(M, p1, p), std::invalid_argument);  // eta <= 1 diverges
  SymmetricTensorField e0(2, 0, c, DecaySpec::exponential(0.0, 1.0));
  CHECK_THROWS_AS(uf(M, e0, p), std::invalid_argument);
}

TEST_CASE("horizon overflow raises a numerical error") {
  ManifoldModel M = ManifoldModel::euclidean(2);
  auto c = [](const Vec& x) {
    Vec v(1);
    v << std::pow(1.0 + x.norm(), -1.5);
    return v;
  };
  SymmetricTensorField f(2, 0, c, DecaySpec::polynomial(1.5, 1.0));
  Vec x(2), v(2);
  x << 0.0, 0.5;
  v << 1.0, 0.0;
  XrayOptions opt;
  opt.tol = 1e-10;
  opt.max_horizon = 50.0;  // P_1.5 needs a far larger horizon at this tol
  CHECK_THROWS_AS(uf(M, f, SMPoint(M, x, v), opt), std::runtime_error);
}

TEST_CASE("quadrature converges at 4th order") {
  ManifoldModel M = ManifoldModel::hyperbolic(2, 1.0);
  SymmetricTensorField f = parse_field(M, "bump:0.2,-0.1,1.3");
  Vec x(2), v(2);
  x << 0.0, 0.4;
  v << 1.0, 0.1;
  SMPoint p(M, x, v);
  XrayOptions fine;
  fine.step = 1e-3;
  fine.tol = 1e-13;
  const double ref = xray_transform(M, f, p, fine).value;
  double prev = -1.0;
  for (double st : {4e-2, 2e-2, 1e-2}) {
    XrayOptions o;
    o.step = st;
    o.tol = 1e-13;
    const double err = std::abs(xray_transform(M, f, p, o).value - ref);
    if (prev > 0.0) CHECK(prev / err > fx::kQuadOrderRatio);
    prev = err;
  }
}

TEST_CASE("radial exponential bound") {
  ManifoldModel M = ManifoldModel::hyperbolic(2, 1.0);
  auto a = [](const Vec& x) {
    Vec c(1);
    c << std::exp(-3.0 * x.norm());
    return c;
  };
  SymmetricTensorField f(2, 0, a, DecaySpec::exponential(3.0, 1.0));
  Vec x(2), v(2);
  x << 2.0, 0.0;
  v << 1.0, 0.0;
  const double val = uf(M, f, SMPoint(M, x, v)).value;
  CHECK(val > 0.0);
  CHECK(val <= fx::kRadialUfBound);
}

TEST_CASE("potentials are in the kernel of I_1") {
  ManifoldModel M = ManifoldModel::hyperbolic(2, 1.0);
  SymmetricTensorField h = parse_field(M, "bump:0.2,-0.1,1.1");
  SymmetricTensorField f = potential_of(M, h);
  Rng rng(43ull);
  auto seeds = random_seeds(M, 20, 1.5, rng);
  XrayOptions opt;
  opt.step = 2.5e-3;  // the bump edge dominates the Simpson error budget
  CHECK(kernel_probe(M, f, seeds, opt) < fx::kKernelProbeTol);
}

TEST_CASE("transport equation residual and its order") {
  ManifoldModel M = ManifoldModel::euclidean(2);
  SymmetricTensorField f = parse_field(M, "gaussian");
  Rng rng(44ull);
  for (int i = 0; i < 5; ++i) {
    SMPoint p(M, rng.in_disk(1.0), rng.direction2());
    const double r1 = transport_residual(M, f, p, 1e-2);
    const double r2 = transport_residual(M, f, p, 5e-3);
    CHECK(r1 < fx::kTransportTol);
    // the FD truncation is O(h^2); allow slack for the quadrature floor
    CHECK(r1 / r2 > 3.0);
    CHECK(r1 / r2 < 5.0);
  }
}

TEST_CASE("gradient parity under reversal (If = 0 inputs)") {
  ManifoldModel M = ManifoldModel::hyperbolic(2, 1.0);
  Rng rng(45ull);
  for (const char* spec : {"potential:bump", "potential:bump1"}) {
    SymmetricTensorField f = parse_field(M, spec);
    for (int i = 0; i < 3; ++i) {
      SMPoint p(M, rng.in_disk(1.0), rng.direction2());
      GradientSymmetryReport rep = gradient_symmetry_check(M, f, p, 1e-3);
      CHECK(rep.horizontal_defect < 1e-5);
      CHECK(rep.vertical_defect < 1e-5);
    }
  }
}

TEST_CASE("support exit time bounds the compact support") {
  ManifoldModel M = ManifoldModel::hyperbolic(2, 1.0);
  SymmetricTensorField f = parse_field(M, "bump:0,0,1.0");
  Rng rng(46ull);
  for (int i = 0; i < 10; ++i) {
    SMPoint p(M, rng.in_disk(0.8), rng.direction2());
    const double T = support_exit_time(M, p, 1.0, 1e-2);
    SMPoint q = geodesic_flow(M, p, T + 1e-3, 1e-2);
    CHECK(std::abs(lambda_eval(f, q.x, q.v)) == 0.0);
  }
}
