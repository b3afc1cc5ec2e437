#include "radial_bv/error.hpp"
#include "radial_bv/radial_solver.hpp"
#include "reference.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace radial_bv;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

RadialProblem phi_problem(double mu, double m1, double m2, double rho1 = 1.0, double rho2 = 2.0) {
  return RadialProblem{rho1, rho2, m1, m2, EnergyDensity::phi_mu(mu)};
}

}  // namespace

TEST_CASE("graded grid") {
  const auto r = graded_nodes(1.0, 3.0, 64, 3.0);
  REQUIRE(r.size() == 65);
  CHECK(r.front() == 1.0);
  CHECK(r.back() == 3.0);
  for (std::size_t i = 1; i < r.size(); ++i) CHECK(r[i] > r[i - 1]);
  CHECK(r[1] - r[0] < r[64] - r[63]);
  CHECK(r[1] - 1.0 == doctest::Approx(2.0 * std::pow(1.0 / 64.0, 3.0)));
  CHECK_THROWS_AS(graded_nodes(1.0, 2.0, 0, 3.0), Error);
}

TEST_CASE("problem validation") {
  CHECK_THROWS_AS(solve(phi_problem(2.0, 0.0, 1.0, 0.0, 2.0)), Error);
  CHECK_THROWS_AS(solve(phi_problem(2.0, 0.0, 1.0, 2.0, 1.0)), Error);
  CHECK_THROWS_AS(solve(phi_problem(2.0, 0.0, std::nan(""))), Error);
  CHECK_THROWS_AS(solve(phi_problem(2.0, 0.0, 1.0, 1.0, INFINITY)), Error);
  CHECK_THROWS_AS(solve_with_flux(phi_problem(2.0, 0.0, 1.0), 1.5), Error);
}

TEST_CASE("closed-form antiderivatives") {
  const std::pair<double, ClosedFormExponent> forms[] = {
      {1.5, ClosedFormExponent::ThreeHalves}, {2.0, ClosedFormExponent::Two}, {3.0, ClosedFormExponent::Three}};
  for (const auto& [mu, form] : forms) {
    for (double lambda : {0.1, 0.5, 0.9}) {
      for (double r : {1.0, 1.3, 1.8, 2.0}) {
        CAPTURE(mu);
        CAPTURE(lambda);
        CAPTURE(r);
        const double expect = ref::phi_profile(mu, lambda, r, 2.0, 0.0);
        CHECK(closed_form_profile(form, lambda, r, 2.0) == doctest::Approx(expect).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("delta m against Simpson") {
  for (double mu : {1.3, 2.0, 2.5, 4.0}) {
    const RadialProblem p = phi_problem(mu, 0.0, 1.0);
    for (double lambda : {0.05, 0.5, 0.95}) {
      CAPTURE(mu);
      CAPTURE(lambda);
      const double simpson =
          ref::simpson_singular([&](double d) { return ref::phi_slope(mu, lambda, 1.0 + d); }, 1.0, 20000, 2.0);
      CHECK(delta_m(p, lambda) == doctest::Approx(simpson).epsilon(1e-9));
    }
    CHECK(delta_m(p, 0.0) == 0.0);
  }
}

TEST_CASE("delta m at the maximal flux") {
  CHECK(delta_m_infinity(phi_problem(1.5, 0, 0)).infinite);
  CHECK(delta_m_infinity(phi_problem(2.0, 0, 0)).infinite);
  const DeltaM d3 = delta_m_infinity(phi_problem(3.0, 0, 0));
  REQUIRE_FALSE(d3.infinite);
  CHECK(std::abs(d3.value - ref::delta_m_inf_mu3()) < 1e-10);
  // (r - 1)^(-2/3) singularity, flattened by x^6
  const DeltaM d25 = delta_m_infinity(phi_problem(2.5, 0, 0));
  REQUIRE_FALSE(d25.infinite);
  const double simpson =
      ref::simpson_singular([](double d) { return std::pow((1.0 + d) / d, 2.0 / 3.0) - 1.0; }, 1.0, 20000, 6.0);
  CHECK(d25.value == doctest::Approx(simpson).epsilon(1e-9));
  CHECK(std::isinf(delta_m(phi_problem(2.0, 0, 0), 1.0)));
}

TEST_CASE("attained solution satisfies the flux law and the data") {
  for (double mu : {1.5, 2.0, 3.0}) {
    const RadialProblem p = phi_problem(mu, -0.2, 0.4);
    const RadialSolution s = solve(p);
    CAPTURE(mu);
    CHECK(s.attained_inner);
    CHECK(s.sign == 1);
    CHECK(s.lambda > 0.0);
    CHECK(s.lambda < p.max_flux());
    CHECK(s.flux_slack == doctest::Approx(p.max_flux() - s.lambda));
    CHECK(delta_m(p, s.lambda) == doctest::Approx(0.6).epsilon(1e-11));
    CHECK(s.trace_inner == doctest::Approx(-0.2));
    CHECK(s.trace_outer == 0.4);
    REQUIRE(s.profile.size() == SolverOptions{}.grid_nodes);
    CHECK(s.profile.front().u == doctest::Approx(-0.2).epsilon(1e-10));
    CHECK(s.profile.back().u == 0.4);
    for (const auto& n : s.profile) {
      if (!n.du_capped) CHECK(node_flux(p, n) == doctest::Approx(s.lambda).epsilon(1e-9));
      CHECK(n.du >= 0.0);
    }
    CHECK(s.energy.penalty_inner == 0.0);
    CHECK(s.energy.penalty_outer == 0.0);
    const double bulk = kTwoPi * ref::simpson([&](double r) { return ref::phi(mu, ref::phi_slope(mu, s.lambda, r)) * r; },
                                              1.0, 2.0, 4000);
    CHECK(s.energy.bulk == doctest::Approx(bulk).epsilon(1e-8));
    CHECK(s.energy.total == doctest::Approx(s.energy.bulk));
  }
}

TEST_CASE("decreasing data mirror increasing data") {
  const RadialSolution up = solve(phi_problem(2.5, 0.0, 0.7));
  const RadialSolution down = solve(phi_problem(2.5, 0.7, 0.0));
  CHECK(down.sign == -1);
  CHECK(down.lambda == doctest::Approx(up.lambda).epsilon(1e-13));
  CHECK(down.energy.total == doctest::Approx(up.energy.total).epsilon(1e-12));
  for (std::size_t i = 0; i < up.profile.size(); ++i) {
    CHECK(down.profile[i].u == doctest::Approx(0.7 - up.profile[i].u).epsilon(1e-12));
    CHECK(down.profile[i].du == doctest::Approx(-up.profile[i].du).epsilon(1e-12));
  }
}

TEST_CASE("equal data give the constant solution") {
  const RadialProblem p = phi_problem(3.0, 0.25, 0.25);
  const RadialSolution s = solve(p);
  CHECK(s.lambda == 0.0);
  CHECK(s.attained_inner);
  CHECK(s.energy.total == 0.0);
  for (const auto& n : s.profile) {
    CHECK(n.u == 0.25);
    CHECK(n.du == 0.0);
  }
}

TEST_CASE("non-attained solution saturates the flux") {
  const RadialProblem p = phi_problem(3.0, 0.0, 2.0);
  const RadialSolution s = solve(p);
  const double dm = ref::delta_m_inf_mu3();
  CHECK_FALSE(s.attained_inner);
  CHECK(s.lambda == 1.0);
  CHECK(s.flux_slack == 0.0);
  CHECK_FALSE(s.delta_m_inf.infinite);
  CHECK(std::abs(s.trace_inner - (2.0 - dm)) < 1e-10);
  CHECK(std::abs(s.energy.penalty_inner - kTwoPi * (2.0 - dm)) < 1e-9);
  CHECK(s.profile.front().du_capped);
  CHECK(s.energy.total ==
        doctest::Approx(s.energy.bulk + s.energy.singular + s.energy.penalty_inner + s.energy.penalty_outer));
}

TEST_CASE("profile_at reproduces the nodes") {
  const RadialProblem p = phi_problem(2.0, 0.0, 1.5, 0.5, 1.7);
  const RadialSolution s = solve(p);
  for (std::size_t i = 0; i < s.profile.size(); i += 37) {
    const ProfilePoint q = profile_at(s, p, s.profile[i].r);
    CHECK(q.u == doctest::Approx(s.profile[i].u).epsilon(1e-11));
  }
  CHECK_THROWS_AS(profile_at(s, p, 0.4), Error);
  CHECK_THROWS_AS(profile_at(s, p, 1.8), Error);
}

TEST_CASE("solve_with_flux anchors at the outer radius") {
  const RadialProblem p = phi_problem(2.0, 0.0, 1.0);
  const RadialSolution s = solve_with_flux(p, 0.5);
  CHECK(s.lambda == 0.5);
  CHECK(s.profile.back().u == 1.0);
  CHECK(s.trace_inner == doctest::Approx(ref::phi_profile(2.0, 0.5, 1.0, 2.0, 1.0)).epsilon(1e-12));
}

TEST_CASE("other families") {
  const RadialProblem ms{1.0, 3.0, 0.0, 0.5, EnergyDensity::minimal_surface()};
  const RadialSolution s = solve(ms);
  CHECK(s.attained_inner);
  // catenoid: u' = lambda / sqrt(r^2 - lambda^2)
  const double lambda = s.lambda;
  const double height = std::acosh(3.0 / lambda) - std::acosh(1.0 / lambda);
  CHECK(lambda * height == doctest::Approx(0.5).epsilon(1e-10));

  const RadialProblem tall{1.0, 3.0, 0.0, 5.0, EnergyDensity::minimal_surface()};
  const RadialSolution t = solve(tall);
  CHECK_FALSE(t.attained_inner);
  CHECK(t.delta_m_inf.value == doctest::Approx(std::acosh(3.0)).epsilon(1e-10));
}
