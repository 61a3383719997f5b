#pragma once

#include <cstdint>
#include <random>

#include "xrt/types.hpp"

namespace xrt {

// Seedable generator with fully specified output. The engine is the standard
// mt19937_64 (its sequence is pinned by the C++ standard); the distributions
// below are implemented here instead of using <random> distributions, whose
// output is implementation-defined. This keeps runs reproducible across
// compilers and makes seeds portable to other language ports.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // Marsaglia polar method.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = uniform(-1.0, 1.0);
      v = uniform(-1.0, 1.0);
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

  double angle() { return uniform(0.0, 2.0 * kPi); }

  // Uniform w.r.t. chart Lebesgue measure on the disk |x| <= radius.
  Vec in_disk(double radius) {
    const double r = radius * std::sqrt(uniform());
    const double a = angle();
    Vec x(2);
    x << r * std::cos(a), r * std::sin(a);
    return x;
  }

  // Uniform direction on the Euclidean unit circle (chart components).
  Vec direction2() {
    const double a = angle();
    Vec v(2);
    v << std::cos(a), std::sin(a);
    return v;
  }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace xrt
