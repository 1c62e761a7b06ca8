#include <doctest.h>

#include <cmath>

#include "lphom/coefficient.hpp"

using namespace lphom;

namespace {
Vec v1(double a) { Vec v(1); v << a; return v; }
Vec v2(double a, double b) { Vec v(2); v << a, b; return v; }
}  // namespace

TEST_CASE("constant identity field") {
  CoefficientField f = builtin_family("constant", {{"dim", 2}});
  CHECK(f.dim == 2);
  CHECK(f.lambda == doctest::Approx(1.0));
  CHECK(f.lipschitz_x == 0.0);
  CHECK(f.eval(v2(0.3, 0.7), v2(0.1, 0.9)).isApprox(Mat::Identity(2, 2)));
  ValidationReport r = validate_coefficient(f, 100);
  CHECK(r.passed);
  CHECK(r.measured_lambda == doctest::Approx(1.0));
}

TEST_CASE("separable_1d formula and ellipticity against dense sampling") {
  CoefficientField f = builtin_family("separable_1d");
  const double pi2 = 2.0 * M_PI;
  for (double x : {0.0, 0.13, 0.5, 0.77})
    for (double y : {0.0, 0.31, 0.9}) {
      double ref = (2 + std::sin(pi2 * y)) * (1 + 0.5 * std::sin(pi2 * x));
      CHECK(f.eval(v1(x), v1(y))(0, 0) == doctest::Approx(ref).epsilon(1e-14));
    }
  // Dense sampling oracle for the ellipticity pair.
  double lo = INFINITY, hi = 0;
  for (int i = 0; i < 400; ++i)
    for (int j = 0; j < 400; ++j) {
      double a = (2 + std::sin(pi2 * i / 400.0)) * (1 + 0.5 * std::sin(pi2 * j / 400.0));
      lo = std::min(lo, a);
      hi = std::max(hi, a);
    }
  CHECK(f.lambda == doctest::Approx(std::min(lo, 1.0 / hi)).epsilon(1e-6));
  CHECK(validate_coefficient(f, 10000).passed);
}

TEST_CASE("every builtin family passes validation at 1e4 samples") {
  for (const std::string& name : builtin_family_names()) {
    CAPTURE(name);
    ValidationReport r = validate_coefficient(builtin_family(name), 10000, 7);
    CHECK(r.passed);
    CHECK(r.max_periodicity_defect <= 1e-12);
  }
  ValidationReport r = validate_coefficient(builtin_family("periodic_only", {{"dim", 2}}), 10000, 7);
  CHECK(r.passed);
}

TEST_CASE("symmetric flag is truthful") {
  for (const std::string& name : builtin_family_names()) {
    CoefficientField f = builtin_family(name);
    ValidationReport r = validate_coefficient(f, 2000);
    if (f.symmetric) CHECK(r.max_asymmetry == 0.0);
  }
  CHECK_FALSE(builtin_family("smooth_2d_nonsymmetric").symmetric);
}

TEST_CASE("periodic_only has no slow dependence") {
  CoefficientField f = builtin_family("periodic_only");
  CHECK(f.lipschitz_x == 0.0);
  CHECK(f.slow_independent());
  Mat a = f.eval(v1(0.1), v1(0.4));
  CHECK(a.isApprox(f.eval(v1(0.8), v1(0.4))));
  CHECK(f.grad_x(v1(0.3), v1(0.2))[0](0, 0) == 0.0);
}

TEST_CASE("a field claiming too large a lambda fails with a location") {
  CoefficientField f = builtin_family("constant", {{"dim", 2}, {"a11", 2.0}, {"a22", 3.0}});
  f.lambda = 3.0;
  ValidationReport r = validate_coefficient(f, 50);
  CHECK_FALSE(r.passed);
  REQUIRE_FALSE(r.violations.empty());
  CHECK(r.violations.front().find("at x =") != std::string::npos);
}

TEST_CASE("slow gradients match finite differences") {
  for (const std::string& name : builtin_family_names()) {
    CoefficientField f = builtin_family(name);
    const int d = f.dim;
    Vec x = d == 1 ? v1(0.37) : v2(0.37, 0.61);
    Vec y = d == 1 ? v1(0.21) : v2(0.21, 0.83);
    auto g = f.grad_x(x, y);
    for (int l = 0; l < d; ++l) {
      Vec xp = x, xm = x;
      xp[l] += 1e-6;
      xm[l] -= 1e-6;
      Mat fd = (f.eval(xp, y) - f.eval(xm, y)) / 2e-6;
      CAPTURE(name);
      CHECK((fd - g[l]).cwiseAbs().maxCoeff() < 1e-7);
    }
  }
}

TEST_CASE("unknown families and parameters are rejected") {
  CHECK_THROWS_AS(builtin_family("nope"), ConfigError);
  CHECK_THROWS_AS(builtin_family("separable_1d", {{"amp_z", 1.0}}), ConfigError);
  CHECK_THROWS_AS(builtin_family("separable_1d", {{"amp_y", 5.0}}), ConfigError);
  CHECK_THROWS_AS(builtin_family("constant", {{"dim", 2}, {"a11", -1.0}}), ConfigError);
}

TEST_CASE("transposed field") {
  CoefficientField f = builtin_family("smooth_2d_nonsymmetric");
  CoefficientField t = transposed(f);
  Vec x = v2(0.2, 0.4), y = v2(0.6, 0.1);
  CHECK(t.eval(x, y).isApprox(f.eval(x, y).transpose()));
  CHECK(t.grad_x(x, y)[1].isApprox(f.grad_x(x, y)[1].transpose()));
}
