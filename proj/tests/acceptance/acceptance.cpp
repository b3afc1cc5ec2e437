// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include "radial_bv/analysis.hpp"
#include "radial_bv/discrete_oracle.hpp"
#include "radial_bv/radial_solver.hpp"
#include "reference.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace radial_bv;
namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

RadialProblem phi_problem(double mu, double m1, double m2) { return {1.0, 2.0, m1, m2, EnergyDensity::phi_mu(mu)}; }

Outcome golden_profiles() {
  double worst = 0.0;
  for (double mu : {1.5, 2.0, 3.0}) {
    for (double frac : {0.25, 0.5, 0.9}) {
      const RadialProblem p = phi_problem(mu, 0.0, 1.0);
      const double lambda = frac * p.rho1;
      const RadialSolution s = solve_with_flux(p, lambda);
      for (int j = 0; j < 100; ++j) {
        const double r = 1.0 + j / 99.0;
        worst = std::max(worst, std::abs(profile_at(s, p, r).u - ref::phi_profile(mu, lambda, r, 2.0, 1.0)));
      }
    }
  }
  return {worst <= 1e-9, fmt("max abs error %.3g over 9 profiles x 100 radii", worst)};
}

Outcome attainment_dichotomy() {
  bool ok = true;
  std::string wrong;
  for (double mu : {1.2, 1.5, 2.0, 2.01, 2.5, 3.0, 5.0}) {
    const DeltaM d = delta_m_infinity(phi_problem(mu, 0.0, 0.0));
    if (d.infinite != (mu <= 2.0)) {
      ok = false;
      wrong += fmt(" mu=%g", mu);
    }
  }
  const DeltaM d3 = delta_m_infinity(phi_problem(3.0, 0.0, 0.0));
  const double err = std::abs(d3.value - ref::delta_m_inf_mu3());
  return {ok && !d3.infinite && err <= 1e-8,
          (ok ? std::string("classifier matches for 7 exponents") : "mismatch at" + wrong) +
              fmt("; mu=3 error %.3g", err)};
}

Outcome three_halves() {
  bool ok = true;
  double worst = 0.0;
  for (double gap : {0.5, 5.0, 50.0}) {
    const RadialProblem p = phi_problem(1.5, 0.0, gap);
    const RadialSolution s = solve(p);
    ok = ok && s.attained_inner && s.lambda < p.rho1;
    // Delta m from the hand-derived antiderivative
    const double dm = ref::phi_slope_antiderivative(1.5, s.lambda, 2.0) - ref::phi_slope_antiderivative(1.5, s.lambda, 1.0);
    worst = std::max(worst, std::abs(dm - gap) / gap);
  }
  return {ok && worst <= 1e-10, fmt("attained with lambda < rho1; max relative Delta m error %.3g", worst)};
}

Outcome non_attainment() {
  const RadialProblem p = phi_problem(3.0, 0.0, 2.0);
  const RadialSolution s = solve(p);
  const double level = 2.0 - ref::delta_m_inf_mu3();
  const double te = std::abs(s.trace_inner - level);
  const double pe = std::abs(s.energy.penalty_inner - kTwoPi * level);
  return {!s.attained_inner && s.lambda == 1.0 && te <= 1e-8 && pe <= 1e-8,
          fmt("lambda %.17g, trace error %.3g, penalty error %.3g", s.lambda, te, pe)};
}

Outcome oracle_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  const auto problems = random_problems(2024, 20);
  std::vector<AgreementReport> reps(problems.size());
  OracleConfig cfg;
  cfg.cells = 2048;
  AgreementThresholds th;
  th.energy_gap = 1e-3;
  th.linf_attained = 5e-3;
  th.linf_not_attained = 1e-2;
  parallel_for(problems.size(), 0, [&](std::size_t i) { reps[i] = oracle_agreement(problems[i].problem(), cfg, th); });
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::size_t passed = 0, attained = 0;
  double gap = 0.0, linf = 0.0;
  for (const auto& r : reps) {
    passed += r.pass;
    attained += r.attained;
    gap = std::max(gap, r.energy_gap);
    linf = std::max(linf, r.linf);
  }
  return {passed == reps.size() && secs <= 300.0,
          fmt("%.0f/20 agree (%.0f attained)", double(passed), double(attained)) +
              fmt(", max gap %.3g, max L-inf %.3g", gap, linf) + fmt(", %.1f s", secs)};
}

Outcome sweep_bounds() {
  SweepConfig cfg;
  cfg.seed = 1;
  cfg.count = 200;
  const SweepReport r = run_sweep(cfg);
  return {r.failures == 0 && r.max_principle_violations == 0 && r.lower_bound_violations == 0,
          fmt("%.0f problems, %.0f max principle and %.0f lower bound violations", double(r.points.size()),
              double(r.max_principle_violations), double(r.lower_bound_violations)) +
              fmt(", %.0f solver failures", double(r.failures))};
}

Outcome trace_monotonicity() {
  std::vector<double> zetas(50);
  for (std::size_t i = 0; i < zetas.size(); ++i) zetas[i] = -3.0 + 3.9 * static_cast<double>(i) / 49.0;
  const EnergyDensity d = EnergyDensity::phi_mu(3.0);
  const TraceStudy st = trace_monotonicity_study(d, 1.0, 2.0, 1.0, zetas, {}, 0);
  bool monotone = true;
  for (std::size_t i = 1; i < zetas.size(); ++i) monotone = monotone && st.traces[i] >= st.traces[i - 1];

  // saturated zetas: compare every profile to the first one node by node
  const double cut = 1.0 - ref::delta_m_inf_mu3();
  std::vector<RadialSolution> sat;
  for (double z : zetas)
    if (z <= cut) sat.push_back(solve(RadialProblem{1.0, 2.0, z, 1.0, d}));
  double prof = 0.0, trace = 0.0;
  for (const auto& s : sat) {
    trace = std::max(trace, std::abs(s.trace_inner - sat.front().trace_inner));
    for (std::size_t i = 0; i < s.profile.size(); ++i)
      prof = std::max(prof, std::abs(s.profile[i].u - sat.front().profile[i].u));
  }
  return {monotone && sat.size() > 1 && prof <= 1e-9 && trace <= 1e-9,
          std::string(monotone ? "non-decreasing" : "NOT monotone") +
              fmt("; %.0f saturated zetas, profile spread %.3g, trace spread %.3g", double(sat.size()), prof, trace)};
}

Outcome regularization() {
  const RadialProblem p = phi_problem(2.0, 0.0, 0.5 * std::log(3.0));
  const std::vector<double> deltas = {1e-1, 1e-2, 1e-3, 1e-4};
  bool ok = true;
  std::string detail;
  for (OracleMode mode : {OracleMode::QuadraticReg, OracleMode::DensityReg}) {
    OracleConfig cfg;
    cfg.mode = mode;
    const auto rows = regularization_study(p, deltas, cfg);
    detail += (detail.empty() ? "" : "; ") + to_string(mode) + ":";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      detail += fmt(" %.2e", rows[i].l1_distance);
      if (!rows[i].ok || (i && !(rows[i].l1_distance < rows[i - 1].l1_distance))) ok = false;
    }
  }
  return {ok, detail};
}

Outcome density_consistency() {
  const EnergyDensity phi3 = EnergyDensity::phi_mu(3.0);
  const std::vector<EnergyDensity> ds = {
      EnergyDensity::phi_mu(1.5),
      phi3,
      EnergyDensity::g_tilde_k(2.0),
      EnergyDensity::minimal_surface(),
      EnergyDensity::custom_psi([](double t) { return 0.5 * std::pow(1.0 + t, -3.0) + std::pow(1.0 + t, -2.5); }, 3.0, 2.5),
      make_regularized(phi3, 0.1, regularization_window(phi3).midpoint()),
  };
  std::size_t passed = 0;
  std::string failed;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    DensityCheckOptions o;
    o.samples = 1000;
    o.seed = 100 + i;
    const DensityCheck c = density_self_check(ds[i], o);
    if (c.pass())
      ++passed;
    else
      failed += " " + c.density;
  }
  return {passed == ds.size(),
          fmt("%.0f/%.0f families pass on 1000 samples", double(passed), double(ds.size())) +
              (failed.empty() ? "" : ";" + failed)};
}

int run_cli(const std::string& args) {
  const std::string cmd = "\"" RADIAL_BV_CLI "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const fs::path base = fs::path(RADIAL_BV_TEST_WORKDIR) / "acceptance";
  fs::remove_all(base);
  const int a = run_cli("verify --seed 7 --out \"" + (base / "a").string() + "\"");
  const int b = run_cli("verify --seed 7 --out \"" + (base / "b").string() + "\"");
  const std::string ja = slurp(base / "a" / "summary.json");
  const std::string jb = slurp(base / "b" / "summary.json");
  const bool same = !ja.empty() && ja == jb;
  return {a == 0 && b == 0 && same,
          fmt("exit codes %.0f and %.0f, ", a, b) + (same ? "summary.json byte-identical" : "summary.json DIFFERS")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"golden closed-form profiles", golden_profiles},
      {"attainment dichotomy", attainment_dichotomy},
      {"mu = 3/2 attainment", three_halves},
      {"mu = 3 non-attainment", non_attainment},
      {"oracle equivalence", oracle_equivalence},
      {"maximum principle and lower bound", sweep_bounds},
      {"trace monotonicity and saturation", trace_monotonicity},
      {"regularization convergence", regularization},
      {"density self-consistency", density_consistency},
      {"verify determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s criterion %zu: %s (%s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
