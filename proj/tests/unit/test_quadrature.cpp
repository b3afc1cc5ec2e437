#include "radial_bv/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace radial_bv::quad;

TEST_CASE("adaptive Gauss-Kronrod") {
  const Result smooth = integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 1e-13);
  CHECK(smooth.converged);
  CHECK(smooth.value == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(smooth.error < 1e-12);

  const Result peaked = integrate([](double x) { return 1e-3 / (x * x + 1e-6); }, -1.0, 1.0, 1e-12);
  CHECK(peaked.converged);
  CHECK(peaked.value == doctest::Approx(2.0 * std::atan(1e3)).epsilon(1e-11));

  CHECK(integrate([](double) { return 1.0; }, 1.0, 1.0, 1e-12).value == 0.0);
}

TEST_CASE("error estimate scales with the interval") {
  // a single panel of a rough integrand on a tiny interval must not report
  // the reference-interval error
  const Result tiny = integrate([](double x) { return std::sqrt(x); }, 1e-9, 2e-9, 1e-12);
  CHECK(tiny.converged);
  CHECK(tiny.value == doctest::Approx((2.0 / 3.0) * (std::pow(2e-9, 1.5) - std::pow(1e-9, 1.5))).epsilon(1e-12));
}

TEST_CASE("graded integration of integrable singularities") {
  for (double q : {0.25, 0.5, 0.8}) {
    CAPTURE(q);
    const GradedResult r = integrate_graded([q](double d) { return std::pow(d, -q); }, 0.0, 1.0, true);
    CHECK_FALSE(r.divergent);
    CHECK(r.value == doctest::Approx(1.0 / (1.0 - q)).epsilon(1e-10));
  }
  const GradedResult log_sing = integrate_graded([](double d) { return -std::log(d); }, 0.0, 1.0, true);
  CHECK_FALSE(log_sing.divergent);
  CHECK(log_sing.value == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("graded integration detects divergence") {
  CHECK(integrate_graded([](double d) { return 1.0 / d; }, 0.0, 1.0, true).divergent);
  CHECK(integrate_graded([](double d) { return std::pow(d, -1.2); }, 0.0, 1.0, true).divergent);
}

TEST_CASE("graded integration of bounded integrands") {
  const GradedResult r = integrate_graded([](double d) { return std::exp(-d); }, 0.0, 3.0, false);
  CHECK_FALSE(r.divergent);
  CHECK(r.value == doctest::Approx(1.0 - std::exp(-3.0)).epsilon(1e-13));
  const GradedResult off = integrate_graded([](double d) { return d * d; }, 0.5, 2.0, false);
  CHECK(off.value == doctest::Approx((8.0 - 0.125) / 3.0).epsilon(1e-13));
}
