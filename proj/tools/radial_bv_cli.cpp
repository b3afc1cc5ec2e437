// radial_bv: solve, study and verify the relaxed radial problem on an annulus.
//
//   radial_bv solve --density phi-mu --mu 3 --m1 0 --m2 2 --out run
//   radial_bv verify --seed 1 --out check
//
// Exit status: 0 success, 1 solver error (diagnostics JSON on stderr and in
// the output directory), 2 failed check, 64 malformed configuration.

#include "radial_bv/radial_bv.h"
#include "run_config.hpp"
#include "writers.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSolver = 1;
constexpr int kExitCheck = 2;
constexpr int kExitConfig = 64;

/// A failed C API call outside configuration.
struct ApiError {
  rbv_status status;
  std::string stage;
  std::string message;
};

void check(rbv_status s, const std::string& stage) {
  if (s == RBV_OK) return;
  const std::string message = rbv_last_error();
  if (s == RBV_ERR_INVALID_ARGUMENT) throw ConfigError(stage + ": " + message);
  throw ApiError{s, stage, message};
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};

using Density = std::unique_ptr<rbv_density, Deleter<rbv_density, rbv_density_free>>;
using Solution = std::unique_ptr<rbv_solution, Deleter<rbv_solution, rbv_solution_free>>;
using OracleRun = std::unique_ptr<rbv_oracle_result, Deleter<rbv_oracle_result, rbv_oracle_result_free>>;
using Sweep = std::unique_ptr<rbv_sweep, Deleter<rbv_sweep, rbv_sweep_free>>;
using Verify = std::unique_ptr<rbv_verify, Deleter<rbv_verify, rbv_verify_free>>;

double psi_terms(double t, void* data) {
  const auto* terms = static_cast<const std::vector<PsiTerm>*>(data);
  double sum = 0.0;
  for (const PsiTerm& term : *terms) sum += term.c * std::pow(1.0 + t, -term.e);
  return sum;
}

// Density construction failures are configuration errors.
Density make_density(const DensitySpec& spec) {
  rbv_density* raw = nullptr;
  rbv_status s = RBV_OK;
  if (spec.family == "phi-mu") {
    s = rbv_density_phi_mu(spec.mu, &raw);
  } else if (spec.family == "g-tilde-k") {
    s = rbv_density_g_tilde_k(spec.k, &raw);
  } else if (spec.family == "minimal-surface") {
    s = rbv_density_minimal_surface(&raw);
  } else {
    s = rbv_density_custom_psi(psi_terms, const_cast<std::vector<PsiTerm>*>(&spec.psi), spec.mu,
                               spec.mu_bar.value_or(spec.mu), &raw);
  }
  if (s != RBV_OK) throw ConfigError(std::string("density: ") + rbv_last_error());
  Density d(raw);
  if (spec.reg_delta) {
    rbv_density* reg = nullptr;
    const double tau = spec.reg_tau.value_or(std::numeric_limits<double>::quiet_NaN());
    if (rbv_density_regularized(d.get(), *spec.reg_delta, tau, &reg) != RBV_OK)
      throw ConfigError(std::string("density regularization: ") + rbv_last_error());
    d.reset(reg);
  }
  return d;
}

Json density_json(const rbv_density* d, const DensitySpec& spec) {
  Json j;
  j["family"] = spec.family;
  if (spec.family == "phi-mu") j["mu"] = spec.mu;
  if (spec.family == "g-tilde-k") j["k"] = spec.k;
  if (spec.family == "custom") {
    Json terms = Json::array();
    for (const PsiTerm& t : spec.psi) terms.push_back(Json::array({t.c, t.e}));
    j["psi"] = terms;
  }
  std::size_t len = 0;
  check(rbv_density_describe(d, nullptr, 0, &len), "describe density");
  std::string text(len + 1, '\0');
  check(rbv_density_describe(d, text.data(), text.size(), &len), "describe density");
  text.resize(len);
  j["description"] = text;
  double mu = 0.0, mu_bar = 0.0, ginf = 0.0;
  int estimated = 0;
  check(rbv_density_exponents(d, &mu, &mu_bar), "density exponents");
  check(rbv_density_g_prime_inf(d, &ginf, &estimated), "density recession slope");
  j["ellipticity_mu"] = number(mu);
  j["ellipticity_mu_bar"] = number(mu_bar);
  j["g_prime_inf"] = number(ginf);
  j["g_prime_inf_estimated"] = estimated != 0;
  if (spec.reg_delta) {
    double lo = 0.0, hi = 0.0;
    j["regularization_delta"] = *spec.reg_delta;
    if (spec.reg_tau) {
      j["regularization_tau"] = *spec.reg_tau;
    } else {
      DensitySpec plain = spec;
      plain.reg_delta.reset();
      const Density b = make_density(plain);
      check(rbv_regularization_window(b.get(), &lo, &hi), "regularization window");
      j["regularization_tau"] = 0.5 * (lo + hi);
    }
  }
  return j;
}

Json problem_json(const rbv_problem& p) {
  return Json{{"rho1", p.rho1}, {"rho2", p.rho2}, {"m1", p.m1}, {"m2", p.m2}, {"gap", std::abs(p.m2 - p.m1)}};
}

Json solver_tolerances(const rbv_solver_options& o) {
  return Json{{"quad_tol", o.quad_tol}, {"slope_cap", number(o.slope_cap)}, {"max_root_iters", o.max_root_iters}};
}

Json solver_grid(const rbv_solver_options& o) {
  return Json{{"nodes", o.grid_nodes}, {"cells", o.grid_nodes - 1}, {"grading", o.grading}};
}

Json oracle_json(const rbv_oracle_config& o) {
  return Json{{"mode", mode_name(o.mode)},
              {"cells", o.cells},
              {"nodes", o.cells + 1},
              {"grading", o.grading},
              {"tol", o.tol},
              {"penalty_smoothing", o.penalty_smoothing},
              {"max_iters", o.max_iters}};
}

Json energy_json(const rbv_energy& e) {
  return Json{{"bulk", number(e.bulk)},
              {"singular", number(e.singular)},
              {"penalty_inner", number(e.penalty_inner)},
              {"penalty_outer", number(e.penalty_outer)},
              {"total", number(e.total)}};
}

fs::path prepare_out(const RunConfig& cfg) {
  const fs::path out(cfg.out);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) throw ConfigError("cannot create output directory '" + cfg.out + "'");
  return out;
}

int run_solve(const RunConfig& cfg) {
  const fs::path out = prepare_out(cfg);
  const Density d = make_density(cfg.density);
  rbv_boundary_behavior behavior{};
  check(rbv_classify_boundary_behavior(d.get(), &cfg.problem, &cfg.solver, &behavior), "classify boundary behavior");
  rbv_solution* raw = nullptr;
  check(rbv_solve(d.get(), &cfg.problem, &cfg.solver, &raw), "solve");
  const Solution sol(raw);
  rbv_solution_summary s{};
  check(rbv_solution_get_summary(sol.get(), &s), "solution summary");

  CsvWriter csv({"r", "u", "du", "flux"});
  Series profile{"u(r)", {}, false};
  std::size_t capped = 0;
  for (std::size_t i = 0; i < s.nodes; ++i) {
    double r = 0.0, u = 0.0, du = 0.0, flux = 0.0;
    int du_capped = 0;
    check(rbv_solution_node(sol.get(), i, &r, &u, &du, &flux, &du_capped), "solution node");
    csv.row(std::vector<double>{r, u, du, flux});
    profile.points.emplace_back(r, u);
    capped += du_capped != 0;
  }

  double ginf = 0.0;
  check(rbv_density_g_prime_inf(d.get(), &ginf, nullptr), "recession slope");
  Json j;
  j["command"] = "solve";
  j["density"] = density_json(d.get(), cfg.density);
  j["problem"] = problem_json(cfg.problem);
  j["lambda"] = number(s.lambda);
  j["flux_slack"] = number(s.flux_slack);
  j["max_flux"] = number(cfg.problem.rho1 * ginf);
  j["attained_inner"] = s.attained_inner != 0;
  j["trace_inner"] = number(s.trace_inner);
  j["trace_outer"] = number(s.trace_outer);
  j["delta_m_inf"] = number(s.delta_m_inf);
  j["delta_m_infinite"] = s.delta_m_infinite != 0;
  j["classification"] = Json{{"attained", behavior.attained != 0},
                             {"rule", "attained iff |m2 - m1| < delta_m_inf"},
                             {"gap_paid", number(behavior.gap_paid)},
                             {"agrees_with_solution", (behavior.attained != 0) == (s.attained_inner != 0)}};
  j["energy"] = energy_json(s.energy);
  j["capped_slope_nodes"] = capped;
  j["tolerances"] = solver_tolerances(cfg.solver);
  j["grid"] = solver_grid(cfg.solver);

  if (cfg.wants("csv")) csv.save(out / "solution.csv");
  if (cfg.wants("json")) write_json(out / "summary.json", j);
  if (cfg.wants("svg"))
    write_svg_plot(out / "profile.svg", {"radial profile", "r", "u"}, {profile});

  std::printf("lambda = %.17g, attained_inner = %s, trace_inner = %.17g, energy = %.17g\n", s.lambda,
              s.attained_inner ? "true" : "false", s.trace_inner, s.energy.total);
  return kExitOk;
}

int run_sweep(const RunConfig& cfg) {
  const fs::path out = prepare_out(cfg);
  rbv_sweep_config sc = rbv_sweep_config_default();
  sc.seed = cfg.seed;
  sc.count = cfg.sweep_count;
  sc.threads = cfg.threads;
  sc.solver = cfg.solver;
  rbv_sweep* raw = nullptr;
  check(rbv_sweep_run(&sc, &raw), "sweep");
  const Sweep sweep(raw);
  rbv_sweep_summary sum{};
  check(rbv_sweep_get_summary(sweep.get(), &sum), "sweep summary");

  CsvWriter csv({"index", "rho1", "rho2", "mu", "m1", "m2", "ok", "attained", "classified_attained", "lambda",
                 "trace_inner", "delta_m_inf", "energy", "max_principle", "lower_bound"});
  Series attained{"attained", {}, true, false};
  Series detached{"not attained", {}, true, false};
  Json failures = Json::array();
  for (std::size_t i = 0; i < sum.count; ++i) {
    rbv_sweep_point p{};
    check(rbv_sweep_point_at(sweep.get(), i, &p), "sweep point");
    csv.row(std::vector<double>{static_cast<double>(i), p.rho1, p.rho2, p.mu, p.m1, p.m2, double(p.ok),
                                double(p.attained), double(p.classified_attained), p.lambda, p.trace_inner,
                                p.delta_m_inf, p.energy, double(p.max_principle), double(p.lower_bound)});
    if (!p.ok) {
      const char* message = "";
      check(rbv_sweep_point_error(sweep.get(), i, &message), "sweep point error");
      failures.push_back(Json{{"index", i}, {"error", message}});
      continue;
    }
    (p.attained ? attained : detached).points.emplace_back(std::abs(p.m2 - p.m1), p.lambda / p.rho1);
  }

  Json j;
  j["command"] = "sweep";
  j["seed"] = cfg.seed;
  j["count"] = sum.count;
  j["distribution"] = Json{{"rho1", Json::array({0.5, 2.0})},
                           {"rho2_over_rho1", Json::array({1.2, 4.0})},
                           {"mu", Json::array({1.5, 2.0, 2.5, 3.0, 4.0, 6.0})},
                           {"gap_over_rho2", Json::array({0.0, 3.0})},
                           {"m1", Json::array({-1.0, 1.0})}};
  j["solver_failures"] = sum.failures;
  j["classification_mismatches"] = sum.classification_mismatches;
  j["max_principle_violations"] = sum.max_principle_violations;
  j["lower_bound_violations"] = sum.lower_bound_violations;
  j["failures"] = failures;
  j["pass"] = sum.pass != 0;
  j["tolerances"] = solver_tolerances(cfg.solver);
  j["grid"] = solver_grid(cfg.solver);

  if (cfg.wants("csv")) csv.save(out / "sweep.csv");
  if (cfg.wants("json")) write_json(out / "summary.json", j);
  if (cfg.wants("svg"))
    write_svg_plot(out / "sweep.svg", {"flux over the sweep", "|m2 - m1|", "lambda / rho1"}, {attained, detached});

  std::printf("sweep of %zu problems: %zu failures, %zu classification mismatches, %zu maximum principle and %zu "
              "lower bound violations\n",
              sum.count, sum.failures, sum.classification_mismatches, sum.max_principle_violations,
              sum.lower_bound_violations);
  return sum.pass ? kExitOk : kExitCheck;
}

int run_oracle_compare(const RunConfig& cfg) {
  const fs::path out = prepare_out(cfg);
  const Density d = make_density(cfg.density);
  rbv_oracle_config oc = cfg.oracle;
  oc.mode = RBV_ORACLE_RELAXED;
  rbv_agreement a{};
  check(rbv_oracle_agreement(d.get(), &cfg.problem, &oc, &cfg.thresholds, &a), "oracle agreement");

  // node-aligned profiles for the comparison table
  rbv_solver_options so = cfg.solver;
  so.grid_nodes = oc.cells + 1;
  so.grading = oc.grading;
  rbv_solution* sraw = nullptr;
  check(rbv_solve(d.get(), &cfg.problem, &so, &sraw), "solve");
  const Solution sol(sraw);
  rbv_oracle_result* oraw = nullptr;
  check(rbv_oracle_minimize(d.get(), &cfg.problem, &oc, nullptr, 0, &oraw), "oracle minimize");
  const OracleRun oracle(oraw);
  rbv_oracle_summary os{};
  check(rbv_oracle_result_get_summary(oracle.get(), &os), "oracle summary");

  CsvWriter csv({"r", "u_solver", "u_oracle", "difference"});
  Series solver_curve{"solver", {}};
  Series oracle_curve{"oracle", {}};
  for (std::size_t i = 0; i < os.nodes; ++i) {
    double r = 0.0, us = 0.0, uo = 0.0;
    check(rbv_solution_node(sol.get(), i, nullptr, &us, nullptr, nullptr, nullptr), "solution node");
    check(rbv_oracle_result_node(oracle.get(), i, &r, &uo), "oracle node");
    csv.row(std::vector<double>{r, us, uo, uo - us});
    solver_curve.points.emplace_back(r, us);
    oracle_curve.points.emplace_back(r, uo);
  }
  Series history{"E_k - E_solver", {}, true};
  Json hist = Json::array();
  for (std::size_t k = 0; k < os.history; ++k) {
    double e = 0.0;
    check(rbv_oracle_result_history(oracle.get(), k, &e), "oracle history");
    hist.push_back(number(e));
    history.points.emplace_back(static_cast<double>(k), e - a.solver_energy);
  }

  Json j;
  j["command"] = "oracle-compare";
  j["density"] = density_json(d.get(), cfg.density);
  j["problem"] = problem_json(cfg.problem);
  j["attained"] = a.attained != 0;
  j["linf"] = number(a.linf);
  j["l1"] = number(a.l1);
  j["energy_gap"] = number(a.energy_gap);
  j["solver_energy"] = number(a.solver_energy);
  j["oracle_energy"] = number(a.oracle_energy);
  j["oracle_converged"] = a.oracle_converged != 0;
  j["oracle_gradient_norm"] = number(a.oracle_gradient_norm);
  j["oracle_iterations"] = a.oracle_iterations;
  j["energy_dominance"] = a.energy_dominance != 0;
  j["thresholds"] = Json{{"linf_attained", cfg.thresholds.linf_attained},
                         {"linf_not_attained", cfg.thresholds.linf_not_attained},
                         {"energy_gap", cfg.thresholds.energy_gap}};
  j["pass"] = a.pass != 0;
  j["energy_history"] = hist;
  j["oracle"] = oracle_json(oc);
  j["tolerances"] = solver_tolerances(so);
  j["grid"] = solver_grid(so);

  if (cfg.wants("csv")) csv.save(out / "comparison.csv");
  if (cfg.wants("json")) write_json(out / "summary.json", j);
  if (cfg.wants("svg")) {
    write_svg_plot(out / "profile.svg", {"solver and oracle profiles", "r", "u"}, {solver_curve, oracle_curve});
    write_svg_plot(out / "convergence.svg", {"oracle energy convergence", "iteration", "E_k - E_solver", false, true},
                   {history});
  }

  std::printf("oracle-compare: %s (L-inf %.3g, energy gap %.3g, %s)\n", a.pass ? "pass" : "FAIL", a.linf,
              a.energy_gap, a.attained ? "attained" : "not attained");
  return a.pass ? kExitOk : kExitCheck;
}

int run_reg_study(const RunConfig& cfg) {
  const fs::path out = prepare_out(cfg);
  const Density d = make_density(cfg.density);
  std::vector<double> deltas = cfg.reg_deltas;
  std::sort(deltas.begin(), deltas.end(), std::greater<>());

  CsvWriter csv({"mode", "delta", "l1_distance", "energy", "ok"});
  std::vector<Series> curves;
  Json modes = Json::array();
  bool pass = true;
  for (rbv_oracle_mode mode : cfg.reg_modes) {
    rbv_oracle_config oc = cfg.oracle;
    oc.mode = mode;
    oc.tau = std::numeric_limits<double>::quiet_NaN();
    std::vector<rbv_regularization_entry> entries(deltas.size());
    check(rbv_regularization_study(d.get(), &cfg.problem, deltas.data(), deltas.size(), &oc, entries.data()),
          std::string("regularization study (") + mode_name(mode) + ")");
    Series curve{mode_name(mode), {}, true};
    Json rows = Json::array();
    bool decreasing = true;
    bool all_ok = true;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto& e = entries[i];
      all_ok = all_ok && e.ok;
      if (i > 0 && !(e.l1_distance < entries[i - 1].l1_distance)) decreasing = false;
      csv.row(std::vector<std::string>{mode_name(mode), format_double(e.delta), format_double(e.l1_distance),
                                       format_double(e.energy), e.ok ? "1" : "0"});
      rows.push_back(Json{{"delta", e.delta}, {"l1_distance", number(e.l1_distance)}, {"energy", number(e.energy)},
                          {"ok", e.ok != 0}});
      if (e.ok) curve.points.emplace_back(e.delta, e.l1_distance);
    }
    Json m{{"mode", mode_name(mode)}, {"entries", rows}, {"strictly_decreasing", decreasing && all_ok}};
    if (mode == RBV_ORACLE_DENSITY_REG) {
      double lo = 0.0, hi = 0.0;
      check(rbv_regularization_window(d.get(), &lo, &hi), "regularization window");
      m["tau"] = 0.5 * (lo + hi);
      m["tau_window"] = Json::array({lo, hi});
    }
    modes.push_back(m);
    curves.push_back(curve);
    pass = pass && decreasing && all_ok;
  }

  Json j;
  j["command"] = "reg-study";
  j["density"] = density_json(d.get(), cfg.density);
  j["problem"] = problem_json(cfg.problem);
  j["modes"] = modes;
  j["pass"] = pass;
  j["oracle"] = oracle_json(cfg.oracle);
  j["oracle"].erase("mode");
  j["grid"] = Json{{"nodes", cfg.oracle.cells + 1}, {"cells", cfg.oracle.cells}, {"grading", cfg.oracle.grading}};
  j["tolerances"] = Json{{"oracle_tol", cfg.oracle.tol}, {"penalty_smoothing", cfg.oracle.penalty_smoothing},
                         {"quad_tol", cfg.solver.quad_tol}};

  if (cfg.wants("csv")) csv.save(out / "reg_study.csv");
  if (cfg.wants("json")) write_json(out / "summary.json", j);
  if (cfg.wants("svg"))
    write_svg_plot(out / "convergence.svg", {"regularization convergence", "delta", "L1 distance", true, true}, curves);

  std::printf("reg-study: %s\n", pass ? "distances strictly decreasing" : "distances NOT strictly decreasing");
  return pass ? kExitOk : kExitCheck;
}

int run_verify(const RunConfig& cfg) {
  const fs::path out = prepare_out(cfg);
  rbv_verify* raw = nullptr;
  check(rbv_verify_run(&cfg.verify, &raw), "verify");
  const Verify v(raw);
  std::size_t n = 0;
  int pass = 0;
  check(rbv_verify_check_count(v.get(), &n), "verify checks");
  check(rbv_verify_pass(v.get(), &pass), "verify pass");

  CsvWriter csv({"check", "metric", "value"});
  Json checks = Json::array();
  for (std::size_t i = 0; i < n; ++i) {
    const char* name = "";
    const char* detail = "";
    int ok = 0;
    std::size_t metrics = 0;
    check(rbv_verify_check(v.get(), i, &name, &ok, &detail, &metrics), "verify check");
    Json m = Json::object();
    csv.row(std::vector<std::string>{name, "pass", ok ? "1" : "0"});
    for (std::size_t k = 0; k < metrics; ++k) {
      const char* key = "";
      double value = 0.0;
      check(rbv_verify_metric(v.get(), i, k, &key, &value), "verify metric");
      m[key] = number(value);
      csv.row(std::vector<std::string>{name, key, format_double(value)});
    }
    checks.push_back(Json{{"name", name}, {"pass", ok != 0}, {"detail", detail}, {"metrics", m}});
    std::printf("%-28s %s  %s\n", name, ok ? "PASS" : "FAIL", detail);
  }

  Json j;
  j["command"] = "verify";
  j["seed"] = cfg.verify.seed;
  j["pass"] = pass != 0;
  j["checks"] = checks;
  j["config"] = Json{{"sweep_count", cfg.verify.sweep_count},
                     {"oracle_count", cfg.verify.oracle_count},
                     {"density_samples", cfg.verify.density_samples}};
  const rbv_solver_options so = rbv_solver_options_default();
  const rbv_oracle_config oc = rbv_oracle_config_default();
  j["tolerances"] = Json{{"quad_tol", so.quad_tol},
                         {"slope_cap", so.slope_cap},
                         {"oracle_tol", oc.tol},
                         {"penalty_smoothing", oc.penalty_smoothing}};
  j["grid"] = Json{{"solver_nodes", so.grid_nodes},
                   {"oracle_cells", cfg.verify.oracle_cells},
                   {"grading", so.grading}};

  if (cfg.wants("csv")) csv.save(out / "checks.csv");
  if (cfg.wants("json")) write_json(out / "summary.json", j);
  std::printf("verify: %s\n", pass ? "all checks passed" : "checks FAILED");
  return pass ? kExitOk : kExitCheck;
}

void write_diagnostics(const RunConfig& cfg, const ApiError& e) {
  Json j;
  j["status"] = "error";
  j["command"] = cfg.command;
  j["stage"] = e.stage;
  j["code"] = rbv_status_string(e.status);
  j["message"] = e.message;
  j["problem"] = problem_json(cfg.problem);
  j["density"] = Json{{"family", cfg.density.family}, {"mu", cfg.density.mu}, {"k", cfg.density.k}};
  j["tolerances"] = solver_tolerances(cfg.solver);
  j["grid"] = solver_grid(cfg.solver);
  j["oracle"] = oracle_json(cfg.oracle);
  std::cerr << j.dump(2) << "\n";
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (!ec) {
    try {
      write_json(fs::path(cfg.out) / "diagnostics.json", j);
    } catch (const std::exception&) {
    }
  }
}

int dispatch(const RunConfig& cfg) {
  if (cfg.command == "solve") return run_solve(cfg);
  if (cfg.command == "sweep") return run_sweep(cfg);
  if (cfg.command == "oracle-compare") return run_oracle_compare(cfg);
  if (cfg.command == "reg-study") return run_reg_study(cfg);
  return run_verify(cfg);
}

void add_flags(CLI::App* sub, FlagOverrides& f) {
  sub->add_option("--config", f.config, "JSON config file; flags override its values")->check(CLI::ExistingFile);
  sub->add_option("--density", f.density, "phi-mu | g-tilde-k | minimal-surface | custom");
  sub->add_option("--mu", f.mu, "exponent of phi-mu (and of custom densities)");
  sub->add_option("--k", f.k, "exponent of g-tilde-k");
  sub->add_option("--rho1", f.rho1, "inner radius");
  sub->add_option("--rho2", f.rho2, "outer radius");
  sub->add_option("--m1", f.m1, "inner boundary datum");
  sub->add_option("--m2", f.m2, "outer boundary datum");
  sub->add_option("--cells", f.cells, "cells of the solver grid (solve, sweep) or of the oracle grid");
  sub->add_option("--tol", f.tol, "quadrature tolerance (solve, sweep) or oracle gradient tolerance");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--format", f.format, "comma-separated subset of csv,json,svg");
  sub->add_option("--seed", f.seed, "seed of randomized studies");
  sub->add_option("--threads", f.threads, "worker threads (0 = available parallelism)");
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Relaxed radial boundary value problems on an annulus"};
  app.require_subcommand(1);
  FlagOverrides flags;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"solve", "solve one problem with the flux-law solver"},
      {"sweep", "randomized sweep of the maximum principle, lower bound and attainment rule"},
      {"verify", "run the full property suite"},
      {"oracle-compare", "compare the solver with the discrete energy minimizer"},
      {"reg-study", "convergence of regularized minimizers as delta -> 0"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_flags(sub, flags);
    if (name == "sweep") sub->add_option("--count", flags.count, "number of random problems");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  RunConfig cfg;
  try {
    cfg = build_config(command, flags);
    return dispatch(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "radial_bv: configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ApiError& e) {
    write_diagnostics(cfg, e);
    return kExitSolver;
  } catch (const std::exception& e) {
    write_diagnostics(cfg, ApiError{RBV_ERR_INTERNAL, "output", e.what()});
    return kExitSolver;
  }
}

}  // namespace cli

int main(int argc, char** argv) { return cli::run(argc, argv); }
