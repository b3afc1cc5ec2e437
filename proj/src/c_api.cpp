#include "radial_bv/radial_bv.h"

#include "radial_bv/analysis.hpp"
#include "radial_bv/discrete_oracle.hpp"
#include "radial_bv/error.hpp"
#include "radial_bv/radial_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <exception>
#include <limits>
#include <new>
#include <optional>
#include <span>
#include <string>
#include <vector>

using namespace radial_bv;

struct rbv_density {
  EnergyDensity d;
};

struct rbv_solution {
  RadialProblem problem;
  RadialSolution sol;
};

struct rbv_oracle_result {
  OracleResult res;
};

struct rbv_trace_study {
  TraceStudy st;
};

struct rbv_sweep {
  SweepReport rep;
};

struct rbv_verify {
  VerifyReport rep;
};

namespace {

thread_local std::string last_error;

rbv_status fail(rbv_status status, const std::string& message) {
  last_error = message;
  return status;
}

rbv_status map_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return RBV_ERR_INVALID_ARGUMENT;
    case ErrorCode::Domain: return RBV_ERR_DOMAIN;
    case ErrorCode::Numeric: return RBV_ERR_NUMERIC;
    case ErrorCode::NotConverged: return RBV_ERR_NOT_CONVERGED;
  }
  return RBV_ERR_INTERNAL;
}

// Runs body and turns every exception into a status; nothing escapes the C
// boundary.
template <class F>
rbv_status guard(F&& body) {
  try {
    body();
    last_error.clear();
    return RBV_OK;
  } catch (const Error& e) {
    return fail(map_code(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(RBV_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(RBV_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(RBV_ERR_INTERNAL, "unknown exception");
  }
}

template <class... P>
bool any_null(const P*... ptrs) {
  return ((ptrs == nullptr) || ...);
}

rbv_status null_argument() { return fail(RBV_ERR_NULL_POINTER, "null pointer argument"); }
rbv_status out_of_range(std::size_t i, std::size_t n) {
  return fail(RBV_ERR_OUT_OF_RANGE, "index " + std::to_string(i) + " out of range (size " + std::to_string(n) + ")");
}

RadialProblem to_problem(const rbv_density* d, const rbv_problem* p) {
  RadialProblem q{p->rho1, p->rho2, p->m1, p->m2, d->d};
  q.validate();
  return q;
}

SolverOptions to_options(const rbv_solver_options* o) {
  SolverOptions s;
  if (!o) return s;
  s.grid_nodes = o->grid_nodes;
  s.grading = o->grading;
  s.quad_tol = o->quad_tol;
  s.slope_cap = o->slope_cap;
  s.max_root_iters = o->max_root_iters;
  return s;
}

rbv_solver_options from_options(const SolverOptions& s) {
  return {s.grid_nodes, s.grading, s.quad_tol, s.slope_cap, s.max_root_iters};
}

OracleMode to_mode(rbv_oracle_mode m) {
  switch (m) {
    case RBV_ORACLE_RELAXED: return OracleMode::Relaxed;
    case RBV_ORACLE_QUADRATIC_REG: return OracleMode::QuadraticReg;
    case RBV_ORACLE_DENSITY_REG: return OracleMode::DensityReg;
  }
  throw_invalid("unknown oracle mode " + std::to_string(static_cast<int>(m)));
}

OracleConfig to_oracle(const rbv_oracle_config* c) {
  OracleConfig o;
  if (!c) return o;
  o.cells = c->cells;
  o.penalty_smoothing = c->penalty_smoothing;
  o.tol = c->tol;
  o.max_iters = c->max_iters;
  o.mode = to_mode(c->mode);
  o.delta = c->delta;
  o.tau = c->tau;
  o.grading = c->grading;
  return o;
}

double inf_or(const DeltaM& d) { return d.infinite ? std::numeric_limits<double>::infinity() : d.value; }

}  // namespace

extern "C" {

const char* rbv_last_error(void) { return last_error.c_str(); }

const char* rbv_status_string(rbv_status status) {
  switch (status) {
    case RBV_OK: return "ok";
    case RBV_ERR_INVALID_ARGUMENT: return "invalid argument";
    case RBV_ERR_DOMAIN: return "domain error";
    case RBV_ERR_NUMERIC: return "numeric failure";
    case RBV_ERR_NOT_CONVERGED: return "not converged";
    case RBV_ERR_NULL_POINTER: return "null pointer";
    case RBV_ERR_OUT_OF_RANGE: return "index out of range";
    case RBV_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* rbv_version(void) { return "1.0.0"; }

rbv_status rbv_density_phi_mu(double mu, rbv_density** out) {
  if (any_null(out)) return null_argument();
  return guard([&] { *out = new rbv_density{EnergyDensity::phi_mu(mu)}; });
}

rbv_status rbv_density_g_tilde_k(double k, rbv_density** out) {
  if (any_null(out)) return null_argument();
  return guard([&] { *out = new rbv_density{EnergyDensity::g_tilde_k(k)}; });
}

rbv_status rbv_density_minimal_surface(rbv_density** out) {
  if (any_null(out)) return null_argument();
  return guard([&] { *out = new rbv_density{EnergyDensity::minimal_surface()}; });
}

rbv_status rbv_density_custom_psi(rbv_psi_fn psi, void* user_data, double mu, double mu_bar, rbv_density** out) {
  if (any_null(out) || psi == nullptr) return null_argument();
  return guard([&] {
    *out = new rbv_density{EnergyDensity::custom_psi([psi, user_data](double t) { return psi(t, user_data); }, mu, mu_bar)};
  });
}

rbv_status rbv_density_regularized(const rbv_density* base, double delta, double tau, rbv_density** out) {
  if (any_null(base, out)) return null_argument();
  return guard([&] {
    const double t = std::isnan(tau) ? regularization_window(base->d).midpoint() : tau;
    *out = new rbv_density{make_regularized(base->d, delta, t)};
  });
}

rbv_status rbv_regularization_window(const rbv_density* base, double* lower, double* upper) {
  if (any_null(base, lower, upper)) return null_argument();
  return guard([&] {
    const TauWindow w = regularization_window(base->d);
    *lower = w.lower;
    *upper = w.upper;
  });
}

void rbv_density_free(rbv_density* d) { delete d; }

rbv_status rbv_density_family_of(const rbv_density* d, rbv_density_family* out) {
  if (any_null(d, out)) return null_argument();
  return guard([&] { *out = static_cast<rbv_density_family>(static_cast<int>(d->d.family())); });
}

rbv_status rbv_density_g(const rbv_density* d, double t, double* out) {
  if (any_null(d, out)) return null_argument();
  return guard([&] { *out = d->d.g(t); });
}

rbv_status rbv_density_g_prime(const rbv_density* d, double t, double* out) {
  if (any_null(d, out)) return null_argument();
  return guard([&] { *out = d->d.g_prime(t); });
}

rbv_status rbv_density_g_second(const rbv_density* d, double t, double* out) {
  if (any_null(d, out)) return null_argument();
  return guard([&] { *out = d->d.g_second(t); });
}

rbv_status rbv_density_g_prime_deficit(const rbv_density* d, double t, double* out) {
  if (any_null(d, out)) return null_argument();
  return guard([&] { *out = d->d.g_prime_deficit(t); });
}

rbv_status rbv_density_inv_g_prime(const rbv_density* d, double s, double* out) {
  if (any_null(d, out)) return null_argument();
  return guard([&] { *out = d->d.inv_g_prime(s); });
}

rbv_status rbv_density_inv_g_prime_deficit(const rbv_density* d, double gap, double* out) {
  if (any_null(d, out)) return null_argument();
  return guard([&] { *out = d->d.inv_g_prime_deficit(gap); });
}

rbv_status rbv_density_g_prime_inf(const rbv_density* d, double* out, int* estimated) {
  if (any_null(d, out)) return null_argument();
  return guard([&] {
    *out = d->d.g_prime_inf();
    if (estimated) *estimated = d->d.g_prime_inf_estimated() ? 1 : 0;
  });
}

rbv_status rbv_density_exponents(const rbv_density* d, double* mu, double* mu_bar) {
  if (any_null(d, mu, mu_bar)) return null_argument();
  return guard([&] {
    *mu = d->d.mu();
    *mu_bar = d->d.mu_bar();
  });
}

rbv_status rbv_density_describe(const rbv_density* d, char* buf, size_t cap, size_t* len) {
  if (any_null(d)) return null_argument();
  return guard([&] {
    const std::string s = d->d.describe();
    if (len) *len = s.size();
    if (buf && cap > 0) {
      const std::size_t n = std::min(cap - 1, s.size());
      std::memcpy(buf, s.data(), n);
      buf[n] = '\0';
    }
  });
}

rbv_status rbv_density_self_check(const rbv_density* d, size_t samples, uint64_t seed, int check_ellipticity,
                                  rbv_density_check* out) {
  if (any_null(d, out)) return null_argument();
  return guard([&] {
    DensityCheckOptions o;
    o.samples = samples;
    o.seed = seed;
    o.check_ellipticity = check_ellipticity != 0;
    const DensityCheck c = density_self_check(d->d, o);
    *out = {c.fd_g_prime_max_rel, c.fd_g_second_max_rel, c.inverse_max_rel, c.ellipticity.nu1, c.ellipticity.nu2,
            c.monotone, c.below_g_prime_inf, c.convex, c.origin_ok, c.recession_ok, c.ellipticity.ok,
            c.ellipticity_checked, c.sandwich_ok, c.pass()};
  });
}

rbv_solver_options rbv_solver_options_default(void) { return from_options(SolverOptions{}); }

rbv_status rbv_solve(const rbv_density* d, const rbv_problem* p, const rbv_solver_options* opt, rbv_solution** out) {
  if (any_null(d, p, out)) return null_argument();
  return guard([&] {
    RadialProblem q = to_problem(d, p);
    RadialSolution s = solve(q, to_options(opt));
    *out = new rbv_solution{std::move(q), std::move(s)};
  });
}

rbv_status rbv_solve_with_flux(const rbv_density* d, const rbv_problem* p, double lambda,
                               const rbv_solver_options* opt, rbv_solution** out) {
  if (any_null(d, p, out)) return null_argument();
  return guard([&] {
    RadialProblem q = to_problem(d, p);
    RadialSolution s = solve_with_flux(q, lambda, to_options(opt));
    *out = new rbv_solution{std::move(q), std::move(s)};
  });
}

void rbv_solution_free(rbv_solution* s) { delete s; }

rbv_status rbv_solution_get_summary(const rbv_solution* s, rbv_solution_summary* out) {
  if (any_null(s, out)) return null_argument();
  return guard([&] {
    const RadialSolution& v = s->sol;
    const EnergyBreakdown& e = v.energy;
    *out = {v.lambda,
            v.flux_slack,
            v.sign,
            v.attained_inner,
            v.trace_inner,
            v.trace_outer,
            inf_or(v.delta_m_inf),
            v.delta_m_inf.infinite,
            {e.bulk, e.singular, e.penalty_inner, e.penalty_outer, e.total},
            v.profile.size()};
  });
}

rbv_status rbv_solution_node(const rbv_solution* s, size_t i, double* r, double* u, double* du, double* flux,
                             int* du_capped) {
  if (any_null(s)) return null_argument();
  if (i >= s->sol.profile.size()) return out_of_range(i, s->sol.profile.size());
  return guard([&] {
    const ProfileNode& n = s->sol.profile[i];
    if (r) *r = n.r;
    if (u) *u = n.u;
    if (du) *du = n.du;
    if (flux) *flux = node_flux(s->problem, n);
    if (du_capped) *du_capped = n.du_capped;
  });
}

rbv_status rbv_solution_profile_at(const rbv_solution* s, double r, double* u, double* du) {
  if (any_null(s)) return null_argument();
  return guard([&] {
    const ProfilePoint pt = profile_at(s->sol, s->problem, r);
    if (u) *u = pt.u;
    if (du) *du = pt.du;
  });
}

rbv_status rbv_delta_m(const rbv_density* d, const rbv_problem* p, double lambda, const rbv_solver_options* opt,
                       double* out) {
  if (any_null(d, p, out)) return null_argument();
  return guard([&] { *out = delta_m(to_problem(d, p), lambda, to_options(opt)); });
}

rbv_status rbv_delta_m_infinity(const rbv_density* d, const rbv_problem* p, const rbv_solver_options* opt,
                                double* value, int* infinite) {
  if (any_null(d, p, value)) return null_argument();
  return guard([&] {
    const DeltaM m = delta_m_infinity(to_problem(d, p), to_options(opt));
    *value = inf_or(m);
    if (infinite) *infinite = m.infinite;
  });
}

rbv_status rbv_classify_boundary_behavior(const rbv_density* d, const rbv_problem* p, const rbv_solver_options* opt,
                                          rbv_boundary_behavior* out) {
  if (any_null(d, p, out)) return null_argument();
  return guard([&] {
    const BoundaryBehavior b = classify_boundary_behavior(to_problem(d, p), to_options(opt));
    *out = {b.attained, inf_or(b.delta_m_inf), b.delta_m_inf.infinite, b.trace_inner, b.gap_paid};
  });
}

rbv_status rbv_closed_form_profile(rbv_closed_form mu, double lambda, double r, double rho2, double* out) {
  if (any_null(out)) return null_argument();
  return guard([&] {
    ClosedFormExponent e;
    switch (mu) {
      case RBV_CLOSED_FORM_THREE_HALVES: e = ClosedFormExponent::ThreeHalves; break;
      case RBV_CLOSED_FORM_TWO: e = ClosedFormExponent::Two; break;
      case RBV_CLOSED_FORM_THREE: e = ClosedFormExponent::Three; break;
      default: throw_invalid("unknown closed-form exponent");
    }
    *out = closed_form_profile(e, lambda, r, rho2);
  });
}

rbv_oracle_config rbv_oracle_config_default(void) {
  const OracleConfig o;
  return {o.cells, o.penalty_smoothing, o.tol, o.max_iters, RBV_ORACLE_RELAXED, o.delta, o.tau, o.grading};
}

rbv_status rbv_oracle_minimize(const rbv_density* d, const rbv_problem* p, const rbv_oracle_config* cfg,
                               const double* initial, size_t initial_len, rbv_oracle_result** out) {
  if (any_null(d, p, out)) return null_argument();
  return guard([&] {
    std::optional<std::span<const double>> init;
    if (initial) init = std::span<const double>(initial, initial_len);
    *out = new rbv_oracle_result{minimize(to_problem(d, p), to_oracle(cfg), init)};
  });
}

void rbv_oracle_result_free(rbv_oracle_result* r) { delete r; }

rbv_status rbv_oracle_result_get_summary(const rbv_oracle_result* r, rbv_oracle_summary* out) {
  if (any_null(r, out)) return null_argument();
  const OracleResult& v = r->res;
  *out = {v.energy, v.gradient_norm, v.iterations, v.converged, v.f.nodes.size(), v.energy_history.size()};
  last_error.clear();
  return RBV_OK;
}

rbv_status rbv_oracle_result_node(const rbv_oracle_result* r, size_t i, double* radius, double* value) {
  if (any_null(r)) return null_argument();
  const auto& f = r->res.f;
  if (i >= f.nodes.size()) return out_of_range(i, f.nodes.size());
  if (radius) *radius = f.nodes[i];
  if (value) *value = f.values[i];
  last_error.clear();
  return RBV_OK;
}

rbv_status rbv_oracle_result_history(const rbv_oracle_result* r, size_t i, double* energy) {
  if (any_null(r, energy)) return null_argument();
  const auto& h = r->res.energy_history;
  if (i >= h.size()) return out_of_range(i, h.size());
  *energy = h[i];
  last_error.clear();
  return RBV_OK;
}

rbv_agreement_thresholds rbv_agreement_thresholds_default(void) {
  const AgreementThresholds t;
  return {t.linf_attained, t.linf_not_attained, t.energy_gap};
}

rbv_status rbv_oracle_agreement(const rbv_density* d, const rbv_problem* p, const rbv_oracle_config* cfg,
                                const rbv_agreement_thresholds* thresholds, rbv_agreement* out) {
  if (any_null(d, p, out)) return null_argument();
  return guard([&] {
    AgreementThresholds t;
    if (thresholds) t = {thresholds->linf_attained, thresholds->linf_not_attained, thresholds->energy_gap};
    const AgreementReport a = oracle_agreement(to_problem(d, p), to_oracle(cfg), t);
    *out = {a.attained,      a.linf,           a.l1,
            a.energy_gap,    a.solver_energy,  a.oracle_energy,
            a.oracle_converged, a.oracle_gradient_norm, a.oracle_iterations,
            a.energy_dominance, a.pass};
  });
}

rbv_status rbv_regularization_study(const rbv_density* d, const rbv_problem* p, const double* deltas, size_t count,
                                    const rbv_oracle_config* cfg, rbv_regularization_entry* out) {
  if (any_null(d, p, deltas, out)) return null_argument();
  return guard([&] {
    const auto entries =
        regularization_study(to_problem(d, p), std::span<const double>(deltas, count), to_oracle(cfg));
    for (std::size_t i = 0; i < entries.size(); ++i)
      out[i] = {entries[i].delta, entries[i].l1_distance, entries[i].energy, entries[i].ok};
  });
}

rbv_status rbv_trace_study_run(const rbv_density* d, double rho1, double rho2, double m2, const double* zetas,
                               size_t count, const rbv_solver_options* opt, size_t threads, rbv_trace_study** out) {
  if (any_null(d, zetas, out)) return null_argument();
  return guard([&] {
    *out = new rbv_trace_study{trace_monotonicity_study(d->d, rho1, rho2, m2, std::span<const double>(zetas, count),
                                                        to_options(opt), threads)};
  });
}

void rbv_trace_study_free(rbv_trace_study* s) { delete s; }

rbv_status rbv_trace_study_get_summary(const rbv_trace_study* s, rbv_trace_study_summary* out) {
  if (any_null(s, out)) return null_argument();
  const TraceStudy& t = s->st;
  *out = {t.zetas.size(),
          t.saturation_level.has_value(),
          t.saturation_level.value_or(-std::numeric_limits<double>::infinity()),
          t.monotone,
          t.above_data,
          t.saturation_ok,
          t.saturation_trace_spread,
          t.saturation_profile_linf,
          t.formula_confirmed,
          t.formula_max_error,
          t.lipschitz_ok,
          t.pass()};
  last_error.clear();
  return RBV_OK;
}

rbv_status rbv_trace_study_point(const rbv_trace_study* s, size_t i, double* zeta, double* trace, int* attained) {
  if (any_null(s)) return null_argument();
  const TraceStudy& t = s->st;
  if (i >= t.zetas.size()) return out_of_range(i, t.zetas.size());
  if (zeta) *zeta = t.zetas[i];
  if (trace) *trace = t.traces[i];
  if (attained) *attained = t.attained[i];
  last_error.clear();
  return RBV_OK;
}

rbv_sweep_config rbv_sweep_config_default(void) {
  const SweepConfig c;
  return {c.seed, c.count, c.threads, from_options(c.solver)};
}

rbv_status rbv_sweep_run(const rbv_sweep_config* cfg, rbv_sweep** out) {
  if (any_null(cfg, out)) return null_argument();
  return guard([&] {
    SweepConfig c;
    c.seed = cfg->seed;
    c.count = cfg->count;
    c.threads = cfg->threads;
    c.solver = to_options(&cfg->solver);
    *out = new rbv_sweep{run_sweep(c)};
  });
}

void rbv_sweep_free(rbv_sweep* s) { delete s; }

rbv_status rbv_sweep_get_summary(const rbv_sweep* s, rbv_sweep_summary* out) {
  if (any_null(s, out)) return null_argument();
  const SweepReport& r = s->rep;
  *out = {r.points.size(), r.failures, r.classification_mismatches, r.max_principle_violations,
          r.lower_bound_violations, r.pass()};
  last_error.clear();
  return RBV_OK;
}

rbv_status rbv_sweep_point_at(const rbv_sweep* s, size_t i, rbv_sweep_point* out) {
  if (any_null(s, out)) return null_argument();
  const auto& pts = s->rep.points;
  if (i >= pts.size()) return out_of_range(i, pts.size());
  const SweepPoint& p = pts[i];
  *out = {p.params.rho1, p.params.rho2, p.params.mu,  p.params.m1,       p.params.m2,
          p.ok,          p.attained,    p.classified_attained, p.lambda, p.trace_inner,
          inf_or(p.delta_m_inf), p.delta_m_inf.infinite, p.energy, p.max_principle, p.lower_bound};
  last_error.clear();
  return RBV_OK;
}

rbv_status rbv_sweep_point_error(const rbv_sweep* s, size_t i, const char** message) {
  if (any_null(s, message)) return null_argument();
  const auto& pts = s->rep.points;
  if (i >= pts.size()) return out_of_range(i, pts.size());
  *message = pts[i].error.c_str();
  last_error.clear();
  return RBV_OK;
}

rbv_verify_config rbv_verify_config_default(void) {
  const VerifyConfig c;
  return {c.seed, c.sweep_count, c.oracle_count, c.oracle_cells, c.density_samples, c.threads};
}

rbv_status rbv_verify_run(const rbv_verify_config* cfg, rbv_verify** out) {
  if (any_null(cfg, out)) return null_argument();
  return guard([&] {
    VerifyConfig c;
    c.seed = cfg->seed;
    c.sweep_count = cfg->sweep_count;
    c.oracle_count = cfg->oracle_count;
    c.oracle_cells = cfg->oracle_cells;
    c.density_samples = cfg->density_samples;
    c.threads = cfg->threads;
    *out = new rbv_verify{run_verify(c)};
  });
}

void rbv_verify_free(rbv_verify* v) { delete v; }

rbv_status rbv_verify_check_count(const rbv_verify* v, size_t* out) {
  if (any_null(v, out)) return null_argument();
  *out = v->rep.checks.size();
  last_error.clear();
  return RBV_OK;
}

rbv_status rbv_verify_pass(const rbv_verify* v, int* pass) {
  if (any_null(v, pass)) return null_argument();
  *pass = v->rep.pass();
  last_error.clear();
  return RBV_OK;
}

rbv_status rbv_verify_check(const rbv_verify* v, size_t i, const char** name, int* pass, const char** detail,
                            size_t* metric_count) {
  if (any_null(v)) return null_argument();
  const auto& checks = v->rep.checks;
  if (i >= checks.size()) return out_of_range(i, checks.size());
  const VerifyCheck& c = checks[i];
  if (name) *name = c.name.c_str();
  if (pass) *pass = c.pass;
  if (detail) *detail = c.detail.c_str();
  if (metric_count) *metric_count = c.metrics.size();
  last_error.clear();
  return RBV_OK;
}

rbv_status rbv_verify_metric(const rbv_verify* v, size_t check, size_t j, const char** name, double* value) {
  if (any_null(v)) return null_argument();
  const auto& checks = v->rep.checks;
  if (check >= checks.size()) return out_of_range(check, checks.size());
  const auto& m = checks[check].metrics;
  if (j >= m.size()) return out_of_range(j, m.size());
  if (name) *name = m[j].first.c_str();
  if (value) *value = m[j].second;
  last_error.clear();
  return RBV_OK;
}

}  // extern "C"
