#include "radial_bv/analysis.hpp"
#include "radial_bv/error.hpp"
#include "reference.hpp"

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <set>
#include <stdexcept>

using namespace radial_bv;

TEST_CASE("rng is portable") {
  SweepRng a(42), b(42), c(43);
  std::mt19937_64 raw(42);
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x == static_cast<double>(raw() >> 11) / 9007199254740992.0);
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
  CHECK(a.uniform() != c.uniform());
}

TEST_CASE("random problems respect their ranges") {
  const auto ps = random_problems(7, 200);
  REQUIRE(ps.size() == 200);
  const std::set<double> mus = {1.5, 2.0, 2.5, 3.0, 4.0, 6.0};
  for (const auto& s : ps) {
    CHECK(s.rho1 >= 0.5);
    CHECK(s.rho1 <= 2.0);
    CHECK(s.rho2 / s.rho1 >= 1.2 - 1e-12);
    CHECK(s.rho2 / s.rho1 <= 4.0 + 1e-12);
    CHECK(mus.count(s.mu) == 1);
    CHECK(std::abs(s.m2 - s.m1) <= 3.0 * s.rho2 + 1e-12);
  }
  const auto again = random_problems(7, 200);
  CHECK(again.front().m2 == ps.front().m2);
  CHECK(again.back().rho2 == ps.back().rho2);
}

TEST_CASE("parallel_for covers every index and propagates the lowest failure") {
  for (std::size_t threads : {1u, 3u, 0u}) {
    std::vector<int> hits(257, 0);
    parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
  }
  std::atomic<int> ran{0};
  try {
    parallel_for(50, 4, [&](std::size_t i) {
      ++ran;
      if (i == 7 || i == 31) throw std::runtime_error("fail " + std::to_string(i));
    });
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "fail 7");
  }
}

TEST_CASE("maximum principle and lower bound") {
  const RadialProblem p{1.0, 2.0, -0.5, 1.0, EnergyDensity::phi_mu(2.5)};
  RadialSolution s = solve(p);
  CHECK(check_max_principle(p, s).pass);
  CHECK(check_lower_bound(p, s).pass);
  s.profile[10].u = 1.5;
  const CheckResult mp = check_max_principle(p, s);
  CHECK_FALSE(mp.pass);
  REQUIRE(mp.witness.has_value());
  CHECK(mp.witness->r == s.profile[10].r);
  s.profile[10].u = -0.7;
  CHECK_FALSE(check_lower_bound(p, s).pass);
}

TEST_CASE("boundary classification without solving") {
  const RadialProblem attained{1.0, 2.0, 0.0, 0.5, EnergyDensity::phi_mu(3.0)};
  const BoundaryBehavior a = classify_boundary_behavior(attained);
  CHECK(a.attained);
  const RadialProblem jump{1.0, 2.0, 1.0, -1.0, EnergyDensity::phi_mu(3.0)};
  const BoundaryBehavior b = classify_boundary_behavior(jump);
  CHECK_FALSE(b.attained);
  CHECK(b.gap_paid == doctest::Approx(2.0 - ref::delta_m_inf_mu3()));
  CHECK(b.trace_inner == doctest::Approx(-1.0 + ref::delta_m_inf_mu3()));
  const RadialProblem any{1.0, 2.0, 0.0, 1e6, EnergyDensity::phi_mu(2.0)};
  CHECK(classify_boundary_behavior(any).attained);
  CHECK(classify_boundary_behavior(any).delta_m_inf.infinite);
}

TEST_CASE("trace study: monotone and saturated") {
  std::vector<double> zetas;
  for (int i = 0; i < 12; ++i) zetas.push_back(-3.0 + 3.9 * i / 11.0);
  const TraceStudy st = trace_monotonicity_study(EnergyDensity::phi_mu(3.0), 1.0, 2.0, 1.0, zetas, {}, 2);
  CHECK(st.pass());
  REQUIRE(st.saturation_level.has_value());
  CHECK(*st.saturation_level == doctest::Approx(1.0 - ref::delta_m_inf_mu3()));
  CHECK(st.formula_confirmed);
  CHECK(st.lipschitz_ok);
  CHECK(st.saturation_profile_linf <= 1e-9);
  for (std::size_t i = 0; i < zetas.size(); ++i) {
    CAPTURE(zetas[i]);
    CHECK(st.traces[i] == doctest::Approx(std::max(zetas[i], *st.saturation_level)).epsilon(1e-9));
    CHECK(st.attained[i] == (zetas[i] > *st.saturation_level));
  }
  const std::vector<double> bad = {0.0, -1.0};
  CHECK_THROWS_AS(trace_monotonicity_study(EnergyDensity::phi_mu(3.0), 1.0, 2.0, 1.0, bad), Error);
}

TEST_CASE("oracle agreement report") {
  const RadialProblem p{1.0, 2.0, 0.0, 2.0, EnergyDensity::phi_mu(3.0)};
  OracleConfig c;
  c.cells = 512;
  const AgreementReport r = oracle_agreement(p, c);
  CHECK_FALSE(r.attained);
  CHECK(r.oracle_converged);
  CHECK(r.energy_dominance);
  CHECK(r.linf <= 1e-2);
  CHECK(r.energy_gap <= 1e-3);
  CHECK(r.pass);
  AgreementThresholds strict;
  strict.linf_not_attained = 1e-12;
  CHECK_FALSE(oracle_agreement(p, c, strict).pass);
}

TEST_CASE("sweep is independent of the thread count") {
  SweepConfig a;
  a.count = 24;
  a.threads = 1;
  SweepConfig b = a;
  b.threads = 3;
  const SweepReport ra = run_sweep(a);
  const SweepReport rb = run_sweep(b);
  CHECK(ra.pass());
  REQUIRE(ra.points.size() == 24);
  for (std::size_t i = 0; i < ra.points.size(); ++i) {
    CHECK(ra.points[i].ok);
    CHECK(ra.points[i].lambda == rb.points[i].lambda);
    CHECK(ra.points[i].energy == rb.points[i].energy);
    CHECK(ra.points[i].attained == ra.points[i].classified_attained);
  }
}

TEST_CASE("verify report is complete") {
  VerifyConfig c;
  c.sweep_count = 10;
  c.oracle_count = 2;
  c.oracle_cells = 256;
  c.density_samples = 50;
  const VerifyReport r = run_verify(c);
  const std::vector<std::string> names = {"golden_profiles",        "attainment_dichotomy",
                                          "three_halves_attainment", "non_attainment_benchmark",
                                          "oracle_agreement",        "oracle_restart",
                                          "sweep_bounds",            "trace_monotonicity",
                                          "regularization_convergence", "density_self_consistency"};
  REQUIRE(r.checks.size() == names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    CAPTURE(r.checks[i].detail);
    CHECK(r.checks[i].name == names[i]);
    CHECK(r.checks[i].pass);
    CHECK_FALSE(r.checks[i].metrics.empty());
  }
  CHECK(r.pass());
}
