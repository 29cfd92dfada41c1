#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <limits>

#include "avgkernel/error.hpp"
#include "avgkernel/kernels.hpp"
#include "avgkernel/tensor_quad.hpp"
#include "test_support.hpp"

using namespace avgkernel;
using avgkernel::testing::relative_difference;
using avgkernel::testing::TempDir;

namespace {

// Gamma(4/3), mpmath at 50 digits.
constexpr double kGammaFourThirds = 0.89297951156924921121856431365822588;

double factorial(int m) {
  double f = 1.0;
  for (int i = 2; i <= m; ++i) f *= i;
  return f;
}

}  // namespace

TEST_CASE("integrate_1d") {
  for (int k : {1, 2, 7, 40, 200}) {
    const QuadratureRule rule = compute_rule(k);
    CAPTURE(k);
    CHECK(integrate_1d(rule, [](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(integrate_1d(rule, [](double x) { return x; }) == doctest::Approx(1.0).epsilon(1e-12));
  }
  // x^(1/3) is not smooth at the origin, so the error decays only
  // algebraically: scipy's roots_laguerre gives errors 1.9387e-3 at k = 20
  // and 7.696e-4 at k = 40.
  auto cube_root = [](int k) { return integrate_1d(compute_rule(k), [](double x) { return std::cbrt(x); }); };
  CHECK(cube_root(20) - kGammaFourThirds == doctest::Approx(1.9387428579630273e-3).epsilon(1e-6));
  CHECK(std::abs(cube_root(40) - kGammaFourThirds) < 1e-3);
}

TEST_CASE("integrate_2d basics") {
  for (int k : {1, 3, 25}) {
    const QuadratureRule rule = compute_rule(k);
    CAPTURE(k);
    CHECK(integrate_2d(rule, [](double, double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(integrate_2d(rule, [](double x, double y) { return x * y; }) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("integrate_2d of the shear kernel at 361 points") {
  const KernelSpec sc = builtin_kernel(BuiltinKernel::sc);
  const double q = integrate_2d(compute_rule(361), [&](double x, double y) { return sc(x, y); });
  CHECK(std::abs(q - 6.8371) < 1e-3);
}

TEST_CASE("non-finite integrands name the node") {
  const QuadratureRule rule = compute_rule(6);
  try {
    integrate_1d(rule, [](double x) { return x > 5 ? std::numeric_limits<double>::infinity() : x; });
    FAIL("expected NonFiniteIntegrandError");
  } catch (const NonFiniteIntegrandError& e) {
    CHECK(std::string(e.what()).find("x_4") != std::string::npos);
  }
  try {
    integrate_2d(rule, [](double x, double y) { return 1.0 / (x - y); });
    FAIL("expected NonFiniteIntegrandError");
  } catch (const NonFiniteIntegrandError& e) {
    CHECK(std::string(e.what()).find("(x_1, x_1)") != std::string::npos);
  }
}

TEST_CASE("symmetric integrands integrate identically when swapped") {
  for (BuiltinKernel id : {BuiltinKernel::fm, BuiltinKernel::cr, BuiltinKernel::sc, BuiltinKernel::sd}) {
    const KernelSpec spec = builtin_kernel(id);
    for (int k : {10, 60}) {
      const QuadratureRule rule = compute_rule(k);
      const double forward = integrate_2d(rule, [&](double x, double y) { return spec(x, y); });
      const double swapped = integrate_2d(rule, [&](double x, double y) { return spec(y, x); });
      CAPTURE(spec.id());
      CAPTURE(k);
      CHECK(relative_difference(forward, swapped) <= 1e-15);
    }
  }
}

TEST_CASE("separable integrands factor") {
  auto g = [](double x) { return std::cbrt(x) + 0.5; };
  auto h = [](double y) { return std::sqrt(y) * std::exp(-0.1 * y); };
  for (int k : {4, 30, 120}) {
    const QuadratureRule rule = compute_rule(k);
    const double product = integrate_1d(rule, g) * integrate_1d(rule, h);
    const double joint = integrate_2d(rule, [&](double x, double y) { return g(x) * h(y); });
    CAPTURE(k);
    CHECK(relative_difference(joint, product) < 1e-13);
  }
}

TEST_CASE("2D exactness for monomials") {
  for (int k = 1; k <= 20; ++k) {
    const QuadratureRule rule = compute_rule(k);
    for (int a = 0; a <= std::min(10, 2 * k - 1); ++a) {
      for (int b = 0; b <= std::min(10, 2 * k - 1); ++b) {
        const double value = integrate_2d(rule, [&](double x, double y) { return std::pow(x, a) * std::pow(y, b); });
        CAPTURE(k);
        CAPTURE(a);
        CAPTURE(b);
        CHECK(relative_difference(value, factorial(a) * factorial(b)) < 1e-9);
      }
    }
  }
}

TEST_CASE("convergence_series") {
  TempDir dir("series");
  const ConvergenceSeries ones = convergence_series([](double, double) { return 1.0; }, "one", 5, dir.path());
  CHECK(ones.integrand_id == "one");
  REQUIRE(ones.values.size() == 5);
  for (int i = 0; i < 5; ++i) {
    CHECK(ones.orders[i] == i + 1);
    CHECK(ones.values[i] == doctest::Approx(1.0).epsilon(1e-15));
  }
  CHECK_THROWS_AS(convergence_series([](double, double) { return 1.0; }, "one", 1, dir.path()), ValidationError);

  try {
    convergence_series([](double x, double) { return x > 3.0 ? std::nan("") : 1.0; }, "nan", 6, dir.path());
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).rfind("k=2:", 0) == 0);
  }
}

TEST_CASE("full-scale series of the continuum kernel") {
  TempDir dir("series-cr");
  const KernelSpec cr = builtin_kernel(BuiltinKernel::cr);
  const ConvergenceSeries s = convergence_series([&](double x, double y) { return cr(x, y); }, "CR", 361, dir.path());
  REQUIRE(s.values.size() == 361);
  for (double v : s.values) CHECK(std::isfinite(v));
  // Closed form 2 + 2 Gamma(4/3) Gamma(2/3) (mpmath); the tail beyond 361
  // points is about 0.014 for this kernel.
  constexpr double exact = 4.4183991523122904674587710101895;
  CHECK(s.values.back() < exact);
  CHECK(exact - s.values.back() < 0.02);
}

TEST_CASE("warm cache makes the series at least 5x faster") {
  TempDir dir("series-warm");
  auto run = [&] {
    const auto start = std::chrono::steady_clock::now();
    convergence_series([](double, double) { return 1.0; }, "one", 250, dir.path());
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  const double cold = run();
  const double warm = run();
  MESSAGE("cold " << cold << " s, warm " << warm << " s");
  CHECK(cold >= 5.0 * warm);
}
