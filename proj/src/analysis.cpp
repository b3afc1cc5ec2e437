#include "radial_bv/analysis.hpp"

#include "radial_bv/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <numbers>
#include <thread>

namespace radial_bv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

std::vector<double> profile_values(const RadialSolution& sol) {
  std::vector<double> u(sol.profile.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = sol.profile[i].u;
  return u;
}

}  // namespace

CheckResult check_max_principle(const RadialProblem& p, const RadialSolution& sol) {
  const double bound = std::max(std::abs(p.m1), std::abs(p.m2)) + 1e-12;
  for (const auto& node : sol.profile)
    if (!(std::abs(node.u) <= bound)) return {false, Witness{node.r, node.u}};
  return {};
}

CheckResult check_lower_bound(const RadialProblem& p, const RadialSolution& sol) {
  const double s = p.sign();
  for (const auto& node : sol.profile)
    if (!(s * node.u >= s * p.m1 - 1e-12)) return {false, Witness{node.r, node.u}};
  return {};
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  std::vector<std::exception_ptr> errors(n);
  auto run = [&](std::size_t i) {
    try {
      body(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) run(i);
      });
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

TraceStudy trace_monotonicity_study(const EnergyDensity& density, double rho1, double rho2, double m2,
                                    std::span<const double> zetas, const SolverOptions& opt, std::size_t threads) {
  if (zetas.empty()) throw_invalid("trace study needs at least one zeta");
  for (std::size_t i = 0; i < zetas.size(); ++i) {
    if (!std::isfinite(zetas[i]) || !(zetas[i] < m2)) throw_invalid("trace study: every zeta must be finite and < m2");
    if (i > 0 && !(zetas[i] > zetas[i - 1])) throw_invalid("trace study: zetas must be strictly increasing");
  }

  TraceStudy st{density, rho1, rho2, m2, {zetas.begin(), zetas.end()}, {}, {}, std::nullopt};
  const std::size_t n = zetas.size();
  std::vector<RadialSolution> sols(n);
  parallel_for(n, threads, [&](std::size_t i) {
    try {
      sols[i] = solve(RadialProblem{rho1, rho2, zetas[i], m2, density}, opt);
    } catch (const std::exception& ex) {
      throw Error(ErrorCode::Numeric, fmt("trace study failed at zeta = %.17g: ", zetas[i]) + ex.what());
    }
  });

  st.traces.resize(n);
  st.attained.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    st.traces[i] = sols[i].trace_inner;
    st.attained[i] = sols[i].attained_inner;
  }
  const DeltaM dinf = sols.front().delta_m_inf;
  if (!dinf.infinite) st.saturation_level = m2 - dinf.value;
  const double level = st.saturation_level.value_or(-kInf);

  std::vector<std::size_t> saturated;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = zetas[i];
    const double t = st.traces[i];
    if (!(t >= z - 1e-12)) st.above_data = false;
    if (i > 0) {
      const double rise = t - st.traces[i - 1];
      if (!(rise >= -1e-12)) st.monotone = false;
      if (!(rise <= zetas[i] - zetas[i - 1] + 1e-9)) st.lipschitz_ok = false;
    }
    const double err = std::abs(t - std::max(z, level));
    st.formula_max_error = std::max(st.formula_max_error, err);
    if (z <= level) {
      st.saturation_trace_spread = std::max(st.saturation_trace_spread, std::abs(t - level));
      saturated.push_back(i);
    }
  }
  for (std::size_t i : saturated) {
    const auto& prof = sols[i].profile;
    const auto& ref = sols[saturated.front()].profile;
    for (std::size_t k = 0; k < prof.size(); ++k)
      st.saturation_profile_linf = std::max(st.saturation_profile_linf, std::abs(prof[k].u - ref[k].u));
  }
  st.saturation_ok = st.saturation_trace_spread <= 1e-9 && st.saturation_profile_linf <= 1e-9;
  st.formula_confirmed = st.formula_max_error <= 1e-8;
  return st;
}

BoundaryBehavior classify_boundary_behavior(const RadialProblem& p, const SolverOptions& opt) {
  p.validate();
  BoundaryBehavior b;
  b.delta_m_inf = delta_m_infinity(p, opt);
  const double gap = p.gap();
  b.attained = gap == 0.0 || b.delta_m_inf.infinite || gap < b.delta_m_inf.value;
  if (b.attained) {
    b.trace_inner = p.m1;
  } else {
    b.trace_inner = p.m2 - p.sign() * b.delta_m_inf.value;
    b.gap_paid = gap - b.delta_m_inf.value;
  }
  return b;
}

AgreementReport oracle_agreement(const RadialProblem& p, const OracleConfig& cfg,
                                 const AgreementThresholds& thresholds) {
  if (cfg.mode != OracleMode::Relaxed) throw_invalid("oracle agreement compares against the relaxed oracle");
  SolverOptions sopt;
  sopt.grid_nodes = cfg.cells + 1;
  sopt.grading = cfg.grading;
  const RadialSolution sol = solve(p, sopt);
  const OracleResult res = minimize(p, cfg);

  AgreementReport rep;
  rep.attained = sol.attained_inner;
  const auto u = profile_values(sol);
  for (std::size_t i = 0; i < u.size(); ++i) rep.linf = std::max(rep.linf, std::abs(u[i] - res.f.values[i]));
  rep.l1 = weighted_l1(res.f.nodes, u, res.f.values);
  rep.solver_energy = sol.energy.total;
  rep.oracle_energy = res.energy;
  const double diff = std::abs(rep.oracle_energy - rep.solver_energy);
  rep.energy_gap = diff == 0.0 ? 0.0 : diff / std::max(std::abs(rep.solver_energy), std::numeric_limits<double>::min());
  rep.oracle_converged = res.converged;
  rep.oracle_gradient_norm = res.gradient_norm;
  rep.oracle_iterations = res.iterations;
  const double floor = rep.solver_energy - 1e-9 * (1.0 + std::abs(rep.solver_energy));
  for (double e : res.energy_history)
    if (!(e >= floor)) rep.energy_dominance = false;
  const double linf_limit = rep.attained ? thresholds.linf_attained : thresholds.linf_not_attained;
  rep.pass = rep.oracle_converged && rep.energy_dominance && rep.linf <= linf_limit &&
             rep.energy_gap <= thresholds.energy_gap;
  return rep;
}

bool DensityCheck::pass() const {
  return fd_g_prime_max_rel <= 1e-6 && fd_g_second_max_rel <= 1e-5 && inverse_max_rel <= 1e-10 && monotone &&
         below_g_prime_inf && convex && origin_ok && recession_ok && (!ellipticity_checked || ellipticity.ok) &&
         sandwich_ok;
}

DensityCheck density_self_check(const EnergyDensity& d, const DensityCheckOptions& opt) {
  DensityCheck c;
  c.density = d.describe();
  c.samples = opt.samples;
  SweepRng rng(opt.seed);
  const double ginf = d.g_prime_inf();

  std::vector<double> ts(opt.samples);
  for (auto& t : ts) t = std::pow(10.0, rng.uniform(-6.0, 6.0));
  std::sort(ts.begin(), ts.end());

  for (double t : ts) {
    const double h = 1e-4 * t;
    const double fd1 = (d.g(t + h) - d.g(t - h)) / (2.0 * h);
    const double g1 = d.g_prime(t);
    c.fd_g_prime_max_rel = std::max(c.fd_g_prime_max_rel, std::abs(fd1 - g1) / g1);
    // difference whichever of g' and its deficit is the small one
    const double fd2 = g1 < 0.5 * ginf ? (d.g_prime(t + h) - d.g_prime(t - h)) / (2.0 * h)
                                       : (d.g_prime_deficit(t - h) - d.g_prime_deficit(t + h)) / (2.0 * h);
    const double g2 = d.g_second(t);
    c.fd_g_second_max_rel = std::max(c.fd_g_second_max_rel, std::abs(fd2 - g2) / g2);

    const double deficit = d.g_prime_deficit(t);
    if (!(deficit > 0.0) || !(g1 <= ginf)) c.below_g_prime_inf = false;
    const double back = deficit >= 1e-4 * ginf ? d.inv_g_prime(g1) : d.inv_g_prime_deficit(deficit);
    c.inverse_max_rel = std::max(c.inverse_max_rel, std::abs(back - t) / t);
  }
  for (std::size_t i = 1; i < ts.size(); ++i) {
    if (!(ts[i] > ts[i - 1])) continue;
    const bool small = d.g_prime(ts[i]) < 0.5 * ginf;
    const bool up = small ? d.g_prime(ts[i]) > d.g_prime(ts[i - 1])
                          : d.g_prime_deficit(ts[i]) < d.g_prime_deficit(ts[i - 1]);
    if (!up) c.monotone = false;
  }

  for (std::size_t i = 0; i < opt.samples; ++i) {
    double t1 = std::pow(10.0, rng.uniform(-6.0, 6.0));
    double t2 = std::pow(10.0, rng.uniform(-6.0, 6.0));
    if (t1 > t2) std::swap(t1, t2);
    const double th = rng.uniform();
    const double lhs = d.g(th * t1 + (1.0 - th) * t2);
    const double rhs = th * d.g(t1) + (1.0 - th) * d.g(t2);
    if (!(lhs <= rhs * (1.0 + 1e-13) + 1e-300)) c.convex = false;
  }

  c.origin_ok = d.g(0.0) == 0.0 && d.g_prime(0.0) == 0.0 && d.inv_g_prime(0.0) == 0.0;

  std::vector<double> grid = ts;
  grid.insert(grid.begin(), 0.0);
  c.ellipticity_checked = opt.check_ellipticity;
  c.ellipticity = verify_ellipticity(d, grid);

  // g'_inf - g'(T) <= nu2 / (mu_bar - 1) (1+T)^(1 - mu_bar) bounds how close
  // g' can be expected to get at T
  const double T = 1e12;
  double allowed = 1e-6 * ginf;
  if (c.ellipticity.ok && d.mu_bar() > 1.0)
    allowed = std::max(allowed, 2.0 * c.ellipticity.nu2 / (d.mu_bar() - 1.0) * std::pow(1.0 + T, 1.0 - d.mu_bar()));
  c.recession_ok = d.g_prime_deficit(T) <= allowed && d.g_prime(T) <= ginf;

  if (c.ellipticity_checked && c.ellipticity.ok && d.mu_bar() > 1.0) {
    const double lo = c.ellipticity.nu1 / (d.mu() - 1.0);
    const double hi = c.ellipticity.nu2 / (d.mu_bar() - 1.0);
    for (double t : ts) {
      const double g = d.g(t);
      if (!(lo * phi(d.mu(), t) <= g * (1.0 + 1e-12)) || !(g <= hi * phi(d.mu_bar(), t) * (1.0 + 1e-12)))
        c.sandwich_ok = false;
    }
  }
  return c;
}

RadialProblem SweepProblem::problem() const { return RadialProblem{rho1, rho2, m1, m2, EnergyDensity::phi_mu(mu)}; }

std::vector<SweepProblem> random_problems(std::uint64_t seed, std::size_t count) {
  static constexpr double kMus[] = {1.5, 2.0, 2.5, 3.0, 4.0, 6.0};
  SweepRng rng(seed);
  std::vector<SweepProblem> out(count);
  for (auto& sp : out) {
    sp.rho1 = rng.uniform(0.5, 2.0);
    sp.rho2 = sp.rho1 * rng.uniform(1.2, 4.0);
    sp.mu = kMus[rng.index(6)];
    const double gap = rng.uniform(0.0, 3.0 * sp.rho2);
    sp.m1 = rng.uniform(-1.0, 1.0);
    sp.m2 = rng.uniform() < 0.5 ? sp.m1 - gap : sp.m1 + gap;
  }
  return out;
}

SweepReport run_sweep(const SweepConfig& cfg) {
  const auto problems = random_problems(cfg.seed, cfg.count);
  SweepReport rep;
  rep.points.resize(problems.size());
  parallel_for(problems.size(), cfg.threads, [&](std::size_t i) {
    SweepPoint& pt = rep.points[i];
    pt.params = problems[i];
    try {
      const RadialProblem p = problems[i].problem();
      const RadialSolution sol = solve(p, cfg.solver);
      const BoundaryBehavior b = classify_boundary_behavior(p, cfg.solver);
      pt.attained = sol.attained_inner;
      pt.classified_attained = b.attained;
      pt.lambda = sol.lambda;
      pt.trace_inner = sol.trace_inner;
      pt.delta_m_inf = sol.delta_m_inf;
      pt.energy = sol.energy.total;
      pt.max_principle = check_max_principle(p, sol).pass;
      pt.lower_bound = check_lower_bound(p, sol).pass;
      pt.ok = true;
    } catch (const std::exception& ex) {
      pt.error = ex.what();
    }
  });
  for (const auto& pt : rep.points) {
    if (!pt.ok) {
      ++rep.failures;
      continue;
    }
    if (pt.attained != pt.classified_attained) ++rep.classification_mismatches;
    if (!pt.max_principle) ++rep.max_principle_violations;
    if (!pt.lower_bound) ++rep.lower_bound_violations;
  }
  return rep;
}

bool VerifyReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.pass; });
}

namespace {

// Every check is evaluated inside a guard so that an exception fails that
// check instead of the whole suite.
template <class F>
VerifyCheck guarded(const std::string& name, F&& body) {
  VerifyCheck c;
  c.name = name;
  try {
    body(c);
  } catch (const std::exception& ex) {
    c.pass = false;
    c.detail = std::string("error: ") + ex.what();
  }
  return c;
}

double dm_inf_mu3() { return std::sqrt(2.0) + 0.5 * std::log(3.0 + 2.0 * std::sqrt(2.0)) - 1.0; }

void check_golden(VerifyCheck& c) {
  const std::pair<double, ClosedFormExponent> cases[] = {
      {1.5, ClosedFormExponent::ThreeHalves}, {2.0, ClosedFormExponent::Two}, {3.0, ClosedFormExponent::Three}};
  double worst = 0.0;
  for (const auto& [mu, form] : cases) {
    for (double frac : {0.25, 0.5, 0.9}) {
      const RadialProblem p{1.0, 2.0, 0.0, 1.0, EnergyDensity::phi_mu(mu)};
      const double lambda = frac * p.rho1;
      const RadialSolution sol = solve_with_flux(p, lambda);
      for (int j = 0; j < 100; ++j) {
        const double r = 1.0 + j / 99.0;
        const double u = profile_at(sol, p, r).u;
        worst = std::max(worst, std::abs(u - (p.m2 + closed_form_profile(form, lambda, r, p.rho2))));
      }
    }
  }
  c.metrics.emplace_back("max_abs_error", worst);
  c.pass = worst <= 1e-9;
  c.detail = fmt("max |u - closed form| = %.3g over 9 fluxes x 100 radii", worst);
}

void check_dichotomy(VerifyCheck& c) {
  bool ok = true;
  for (double mu : {1.2, 1.5, 2.0, 2.01, 2.5, 3.0, 5.0}) {
    const DeltaM d = delta_m_infinity(RadialProblem{1.0, 2.0, 0.0, 0.0, EnergyDensity::phi_mu(mu)});
    c.metrics.emplace_back(fmt("delta_m_inf_mu_%g", mu), d.infinite ? kInf : d.value);
    if (d.infinite != (mu <= 2.0)) ok = false;
  }
  const DeltaM d3 = delta_m_infinity(RadialProblem{1.0, 2.0, 0.0, 0.0, EnergyDensity::phi_mu(3.0)});
  const double err = std::abs(d3.value - dm_inf_mu3());
  c.metrics.emplace_back("mu3_closed_form_error", err);
  c.pass = ok && err <= 1e-8;
  c.detail = std::string("classification ") + (ok ? "matches" : "MISMATCH") + fmt("; mu = 3 error %.3g", err);
}

void check_three_halves(VerifyCheck& c) {
  bool ok = true;
  double worst = 0.0;
  for (double gap : {0.5, 5.0, 50.0}) {
    const RadialProblem p{1.0, 2.0, 0.0, gap, EnergyDensity::phi_mu(1.5)};
    const RadialSolution sol = solve(p);
    const double rel = std::abs(delta_m(p, sol.lambda) - gap) / gap;
    worst = std::max(worst, rel);
    if (!sol.attained_inner || !(sol.lambda < p.rho1)) ok = false;
  }
  c.metrics.emplace_back("max_rel_delta_m_error", worst);
  c.pass = ok && worst <= 1e-10;
  c.detail = std::string(ok ? "all attained with lambda < rho1" : "attainment FAILED") +
             fmt("; max relative |Delta m - gap| = %.3g", worst);
}

void check_non_attainment(VerifyCheck& c) {
  const RadialProblem p{1.0, 2.0, 0.0, 2.0, EnergyDensity::phi_mu(3.0)};
  const RadialSolution sol = solve(p);
  const double level = 2.0 - dm_inf_mu3();
  const double trace_err = std::abs(sol.trace_inner - level);
  const double pen_err = std::abs(sol.energy.penalty_inner - kTwoPi * level);
  c.metrics.emplace_back("lambda", sol.lambda);
  c.metrics.emplace_back("trace_inner", sol.trace_inner);
  c.metrics.emplace_back("penalty_inner", sol.energy.penalty_inner);
  c.metrics.emplace_back("trace_error", trace_err);
  c.metrics.emplace_back("penalty_error", pen_err);
  c.pass = !sol.attained_inner && sol.lambda == 1.0 && trace_err <= 1e-8 && pen_err <= 1e-8;
  c.detail = fmt("trace error %.3g, penalty error %.3g", trace_err, pen_err);
}

void check_oracle(VerifyCheck& c, const VerifyConfig& cfg) {
  const auto problems = random_problems(cfg.seed + 1, cfg.oracle_count);
  std::vector<AgreementReport> reps(problems.size());
  OracleConfig oc;
  oc.cells = cfg.oracle_cells;
  parallel_for(problems.size(), cfg.threads, [&](std::size_t i) { reps[i] = oracle_agreement(problems[i].problem(), oc); });
  double linf_a = 0.0, linf_n = 0.0, gap = 0.0;
  std::size_t passed = 0;
  for (const auto& r : reps) {
    (r.attained ? linf_a : linf_n) = std::max(r.attained ? linf_a : linf_n, r.linf);
    gap = std::max(gap, r.energy_gap);
    passed += r.pass;
  }
  c.metrics.emplace_back("problems", static_cast<double>(reps.size()));
  c.metrics.emplace_back("passed", static_cast<double>(passed));
  c.metrics.emplace_back("max_linf_attained", linf_a);
  c.metrics.emplace_back("max_linf_not_attained", linf_n);
  c.metrics.emplace_back("max_energy_gap", gap);
  c.pass = passed == reps.size();
  c.detail = fmt("%.0f of %.0f problems agree", static_cast<double>(passed), static_cast<double>(reps.size()));
}

void check_restart(VerifyCheck& c, const VerifyConfig& cfg) {
  const RadialProblem problems[] = {{1.0, 2.0, 0.0, 0.5 * std::log(3.0), EnergyDensity::phi_mu(2.0)},
                                    {1.0, 2.0, 0.0, 2.0, EnergyDensity::phi_mu(3.0)}};
  OracleConfig oc;
  oc.cells = cfg.oracle_cells;
  double worst = 0.0;
  bool converged = true;
  std::size_t runs = 0;
  for (const auto& p : problems) {
    const OracleResult warm = minimize(p, oc);
    converged = converged && warm.converged;
    const auto r = oracle_nodes(p, oc);
    SweepRng rng(cfg.seed);
    std::vector<std::vector<double>> starts(3, std::vector<double>(r.size()));
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double x = (r[i] - p.rho1) / p.width();
      starts[0][i] = p.m2;
      starts[1][i] = p.m1 + (p.m2 - p.m1) * std::sqrt(x);
      starts[2][i] = p.m1 + (p.m2 - p.m1) * rng.uniform();
    }
    for (const auto& s : starts) {
      const OracleResult cold = minimize(p, oc, std::span<const double>(s));
      converged = converged && cold.converged;
      worst = std::max(worst, std::abs(cold.energy - warm.energy) / std::max(std::abs(warm.energy), 1.0));
      ++runs;
    }
  }
  c.metrics.emplace_back("restarts", static_cast<double>(runs));
  c.metrics.emplace_back("max_rel_energy_spread", worst);
  c.pass = converged && worst <= 1e-8;
  c.detail = fmt("%.0f restarts, max relative energy spread %.3g", static_cast<double>(runs), worst) + (converged ? "" : ", NOT converged");
}

void check_sweep(VerifyCheck& c, const VerifyConfig& cfg) {
  SweepConfig sc;
  sc.seed = cfg.seed;
  sc.count = cfg.sweep_count;
  sc.threads = cfg.threads;
  const SweepReport rep = run_sweep(sc);
  c.metrics.emplace_back("problems", static_cast<double>(rep.points.size()));
  c.metrics.emplace_back("solver_failures", static_cast<double>(rep.failures));
  c.metrics.emplace_back("classification_mismatches", static_cast<double>(rep.classification_mismatches));
  c.metrics.emplace_back("max_principle_violations", static_cast<double>(rep.max_principle_violations));
  c.metrics.emplace_back("lower_bound_violations", static_cast<double>(rep.lower_bound_violations));
  c.pass = rep.pass();
  c.detail = c.pass ? "no violations" : "violations or failures present";
}

void check_traces(VerifyCheck& c, const VerifyConfig& cfg) {
  std::vector<double> zetas(50);
  for (std::size_t i = 0; i < zetas.size(); ++i) zetas[i] = -3.0 + 3.9 * static_cast<double>(i) / 49.0;
  const TraceStudy st = trace_monotonicity_study(EnergyDensity::phi_mu(3.0), 1.0, 2.0, 1.0, zetas, {}, cfg.threads);
  const std::vector<double> z2 = {-2.0, -1.0, 0.0, 0.5};
  const TraceStudy flat = trace_monotonicity_study(EnergyDensity::phi_mu(1.5), 1.0, 2.0, 1.0, z2, {}, cfg.threads);
  bool all_attained = true;
  double flat_err = 0.0;
  for (std::size_t i = 0; i < z2.size(); ++i) {
    all_attained = all_attained && flat.attained[i];
    flat_err = std::max(flat_err, std::abs(flat.traces[i] - z2[i]));
  }
  c.metrics.emplace_back("saturation_level", st.saturation_level.value_or(-kInf));
  c.metrics.emplace_back("saturation_trace_spread", st.saturation_trace_spread);
  c.metrics.emplace_back("saturation_profile_linf", st.saturation_profile_linf);
  c.metrics.emplace_back("formula_max_error", st.formula_max_error);
  c.metrics.emplace_back("formula_confirmed", st.formula_confirmed ? 1.0 : 0.0);
  c.metrics.emplace_back("lipschitz_ok", st.lipschitz_ok ? 1.0 : 0.0);
  c.metrics.emplace_back("mu_three_halves_trace_error", flat_err);
  c.pass = st.pass() && all_attained && flat_err <= 1e-9;
  c.detail = std::string(st.monotone ? "monotone" : "NOT monotone") + (st.saturation_ok ? ", saturated" : ", saturation FAILED") +
             (st.formula_confirmed ? ", formula confirmed" : ", formula not confirmed");
}

void check_regularization(VerifyCheck& c, const VerifyConfig& cfg) {
  const RadialProblem p{1.0, 2.0, 0.0, 0.5 * std::log(3.0), EnergyDensity::phi_mu(2.0)};
  const std::vector<double> deltas = {1e-1, 1e-2, 1e-3, 1e-4};
  bool ok = true;
  for (OracleMode mode : {OracleMode::QuadraticReg, OracleMode::DensityReg}) {
    OracleConfig oc;
    oc.cells = cfg.oracle_cells;
    oc.mode = mode;
    const auto rows = regularization_study(p, deltas, oc);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      c.metrics.emplace_back(to_string(mode) + fmt("_l1_delta_%g", rows[i].delta), rows[i].ok ? rows[i].l1_distance : kInf);
      if (!rows[i].ok || (i > 0 && !(rows[i].l1_distance < rows[i - 1].l1_distance))) ok = false;
    }
  }
  c.pass = ok;
  c.detail = ok ? "L1 distances strictly decreasing in both modes" : "L1 distances not strictly decreasing";
}

void check_densities(VerifyCheck& c, const VerifyConfig& cfg) {
  const EnergyDensity phi3 = EnergyDensity::phi_mu(3.0);
  struct Item {
    EnergyDensity d;
    bool ellipticity;
  };
  const std::vector<Item> items = {
      {EnergyDensity::phi_mu(1.5), true},
      {phi3, true},
      {EnergyDensity::g_tilde_k(2.0), true},
      {EnergyDensity::g_tilde_k(3.0), false},
      {EnergyDensity::minimal_surface(), true},
      {EnergyDensity::custom_psi([](double t) { return 0.5 * std::pow(1.0 + t, -3.0) + std::pow(1.0 + t, -2.5); }, 3.0,
                                 2.5),
       true},
      {make_regularized(phi3, 0.1, regularization_window(phi3).midpoint()), true},
  };
  std::vector<DensityCheck> res(items.size());
  parallel_for(items.size(), cfg.threads, [&](std::size_t i) {
    DensityCheckOptions o;
    o.samples = cfg.density_samples;
    o.seed = cfg.seed + i;
    o.check_ellipticity = items[i].ellipticity;
    res[i] = density_self_check(items[i].d, o);
  });
  std::size_t passed = 0;
  std::string failed;
  for (const auto& r : res) {
    if (r.pass())
      ++passed;
    else
      failed += (failed.empty() ? "" : ", ") + r.density;
  }
  c.metrics.emplace_back("densities", static_cast<double>(res.size()));
  c.metrics.emplace_back("passed", static_cast<double>(passed));
  c.pass = passed == res.size();
  c.detail = c.pass ? "all densities consistent" : "failed: " + failed;
}

}  // namespace

VerifyReport run_verify(const VerifyConfig& cfg) {
  VerifyReport rep;
  rep.checks.push_back(guarded("golden_profiles", check_golden));
  rep.checks.push_back(guarded("attainment_dichotomy", check_dichotomy));
  rep.checks.push_back(guarded("three_halves_attainment", check_three_halves));
  rep.checks.push_back(guarded("non_attainment_benchmark", check_non_attainment));
  rep.checks.push_back(guarded("oracle_agreement", [&](VerifyCheck& c) { check_oracle(c, cfg); }));
  rep.checks.push_back(guarded("oracle_restart", [&](VerifyCheck& c) { check_restart(c, cfg); }));
  rep.checks.push_back(guarded("sweep_bounds", [&](VerifyCheck& c) { check_sweep(c, cfg); }));
  rep.checks.push_back(guarded("trace_monotonicity", [&](VerifyCheck& c) { check_traces(c, cfg); }));
  rep.checks.push_back(guarded("regularization_convergence", [&](VerifyCheck& c) { check_regularization(c, cfg); }));
  rep.checks.push_back(guarded("density_self_consistency", [&](VerifyCheck& c) { check_densities(c, cfg); }));
  return rep;
}

}  // namespace radial_bv
