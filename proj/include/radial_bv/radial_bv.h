#ifndef RADIAL_BV_H
#define RADIAL_BV_H

/* C interface to the radial relaxed-energy solver, the discrete oracle and
 * the property studies. Objects are opaque handles released with the
 * matching *_free function. Every call returns an rbv_status; on failure the
 * message is available from rbv_last_error() on the calling thread. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(RADIAL_BV_BUILDING)
#    define RBV_API __declspec(dllexport)
#  else
#    define RBV_API __declspec(dllimport)
#  endif
#else
#  define RBV_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rbv_status {
  RBV_OK = 0,
  RBV_ERR_INVALID_ARGUMENT = 1,
  RBV_ERR_DOMAIN = 2,
  RBV_ERR_NUMERIC = 3,
  RBV_ERR_NOT_CONVERGED = 4,
  RBV_ERR_NULL_POINTER = 5,
  RBV_ERR_OUT_OF_RANGE = 6,
  RBV_ERR_INTERNAL = 7
} rbv_status;

/* Message of the last failed call on this thread; "" after a success. */
RBV_API const char* rbv_last_error(void);
RBV_API const char* rbv_status_string(rbv_status status);
RBV_API const char* rbv_version(void);

/* ---- densities ---------------------------------------------------------- */

typedef struct rbv_density rbv_density;

typedef enum rbv_density_family {
  RBV_DENSITY_PHI_MU = 0,
  RBV_DENSITY_G_TILDE_K = 1,
  RBV_DENSITY_MINIMAL_SURFACE = 2,
  RBV_DENSITY_CUSTOM_PSI = 3,
  RBV_DENSITY_REGULARIZED = 4
} rbv_density_family;

/* Curvature callback psi(t) = g''(t) for custom densities. It may be called
 * from several threads at once. */
typedef double (*rbv_psi_fn)(double t, void* user_data);

RBV_API rbv_status rbv_density_phi_mu(double mu, rbv_density** out);
RBV_API rbv_status rbv_density_g_tilde_k(double k, rbv_density** out);
RBV_API rbv_status rbv_density_minimal_surface(rbv_density** out);
/* user_data must outlive the density and every object built from it. */
RBV_API rbv_status rbv_density_custom_psi(rbv_psi_fn psi, void* user_data, double mu, double mu_bar,
                                          rbv_density** out);
/* tau = NaN selects the midpoint of the admissible window. */
RBV_API rbv_status rbv_density_regularized(const rbv_density* base, double delta, double tau, rbv_density** out);
RBV_API rbv_status rbv_regularization_window(const rbv_density* base, double* lower, double* upper);
RBV_API void rbv_density_free(rbv_density* d);

RBV_API rbv_status rbv_density_family_of(const rbv_density* d, rbv_density_family* out);
RBV_API rbv_status rbv_density_g(const rbv_density* d, double t, double* out);
RBV_API rbv_status rbv_density_g_prime(const rbv_density* d, double t, double* out);
RBV_API rbv_status rbv_density_g_second(const rbv_density* d, double t, double* out);
RBV_API rbv_status rbv_density_g_prime_deficit(const rbv_density* d, double t, double* out);
RBV_API rbv_status rbv_density_inv_g_prime(const rbv_density* d, double s, double* out);
RBV_API rbv_status rbv_density_inv_g_prime_deficit(const rbv_density* d, double gap, double* out);
RBV_API rbv_status rbv_density_g_prime_inf(const rbv_density* d, double* out, int* estimated);
RBV_API rbv_status rbv_density_exponents(const rbv_density* d, double* mu, double* mu_bar);
/* Writes at most cap bytes including the terminator; *len receives the full
 * length without it. */
RBV_API rbv_status rbv_density_describe(const rbv_density* d, char* buf, size_t cap, size_t* len);

typedef struct rbv_density_check {
  double fd_g_prime_max_rel;
  double fd_g_second_max_rel;
  double inverse_max_rel;
  double nu1;
  double nu2;
  int monotone;
  int below_g_prime_inf;
  int convex;
  int origin_ok;
  int recession_ok;
  int ellipticity_ok;
  int ellipticity_checked;
  int sandwich_ok;
  int pass;
} rbv_density_check;

RBV_API rbv_status rbv_density_self_check(const rbv_density* d, size_t samples, uint64_t seed,
                                          int check_ellipticity, rbv_density_check* out);

/* ---- radial problem and solver ----------------------------------------- */

typedef struct rbv_problem {
  double rho1;
  double rho2;
  double m1;
  double m2;
} rbv_problem;

typedef struct rbv_solver_options {
  size_t grid_nodes;
  double grading;
  double quad_tol;
  double slope_cap;
  size_t max_root_iters;
} rbv_solver_options;

RBV_API rbv_solver_options rbv_solver_options_default(void);

typedef struct rbv_energy {
  double bulk;
  double singular;
  double penalty_inner;
  double penalty_outer;
  double total;
} rbv_energy;

typedef struct rbv_solution_summary {
  double lambda;
  double flux_slack;
  int sign;
  int attained_inner;
  double trace_inner;
  double trace_outer;
  double delta_m_inf;
  int delta_m_infinite;
  rbv_energy energy;
  size_t nodes;
} rbv_solution_summary;

typedef struct rbv_solution rbv_solution;

/* opt may be NULL for the defaults. */
RBV_API rbv_status rbv_solve(const rbv_density* d, const rbv_problem* p, const rbv_solver_options* opt,
                             rbv_solution** out);
RBV_API rbv_status rbv_solve_with_flux(const rbv_density* d, const rbv_problem* p, double lambda,
                                       const rbv_solver_options* opt, rbv_solution** out);
RBV_API void rbv_solution_free(rbv_solution* s);
RBV_API rbv_status rbv_solution_get_summary(const rbv_solution* s, rbv_solution_summary* out);
/* Node i: radius, value, derivative (capped at slope_cap), flux r g'(|u'|)
 * and whether the derivative was capped. Any output pointer may be NULL. */
RBV_API rbv_status rbv_solution_node(const rbv_solution* s, size_t i, double* r, double* u, double* du,
                                     double* flux, int* du_capped);
RBV_API rbv_status rbv_solution_profile_at(const rbv_solution* s, double r, double* u, double* du);

RBV_API rbv_status rbv_delta_m(const rbv_density* d, const rbv_problem* p, double lambda,
                               const rbv_solver_options* opt, double* out);
RBV_API rbv_status rbv_delta_m_infinity(const rbv_density* d, const rbv_problem* p, const rbv_solver_options* opt,
                                        double* value, int* infinite);

typedef struct rbv_boundary_behavior {
  int attained;
  double delta_m_inf;
  int delta_m_infinite;
  double trace_inner;
  double gap_paid;
} rbv_boundary_behavior;

RBV_API rbv_status rbv_classify_boundary_behavior(const rbv_density* d, const rbv_problem* p,
                                                  const rbv_solver_options* opt, rbv_boundary_behavior* out);

typedef enum rbv_closed_form { RBV_CLOSED_FORM_THREE_HALVES = 0, RBV_CLOSED_FORM_TWO = 1, RBV_CLOSED_FORM_THREE = 2 } rbv_closed_form;

/* Closed-form profile of PhiMu for the given exponent, anchored to 0 at rho2. */
RBV_API rbv_status rbv_closed_form_profile(rbv_closed_form mu, double lambda, double r, double rho2, double* out);

/* ---- discrete oracle ---------------------------------------------------- */

typedef enum rbv_oracle_mode {
  RBV_ORACLE_RELAXED = 0,
  RBV_ORACLE_QUADRATIC_REG = 1,
  RBV_ORACLE_DENSITY_REG = 2
} rbv_oracle_mode;

typedef struct rbv_oracle_config {
  size_t cells;
  double penalty_smoothing;
  double tol;
  size_t max_iters;
  rbv_oracle_mode mode;
  double delta;
  /* NaN selects the midpoint of the admissible window */
  double tau;
  double grading;
} rbv_oracle_config;

RBV_API rbv_oracle_config rbv_oracle_config_default(void);

typedef struct rbv_oracle_summary {
  double energy;
  double gradient_norm;
  size_t iterations;
  int converged;
  size_t nodes;
  size_t history;
} rbv_oracle_summary;

typedef struct rbv_oracle_result rbv_oracle_result;

/* initial may be NULL; otherwise it holds cfg->cells + 1 nodal values. */
RBV_API rbv_status rbv_oracle_minimize(const rbv_density* d, const rbv_problem* p, const rbv_oracle_config* cfg,
                                       const double* initial, size_t initial_len, rbv_oracle_result** out);
RBV_API void rbv_oracle_result_free(rbv_oracle_result* r);
RBV_API rbv_status rbv_oracle_result_get_summary(const rbv_oracle_result* r, rbv_oracle_summary* out);
RBV_API rbv_status rbv_oracle_result_node(const rbv_oracle_result* r, size_t i, double* radius, double* value);
RBV_API rbv_status rbv_oracle_result_history(const rbv_oracle_result* r, size_t i, double* energy);

typedef struct rbv_agreement_thresholds {
  double linf_attained;
  double linf_not_attained;
  double energy_gap;
} rbv_agreement_thresholds;

RBV_API rbv_agreement_thresholds rbv_agreement_thresholds_default(void);

typedef struct rbv_agreement {
  int attained;
  double linf;
  double l1;
  double energy_gap;
  double solver_energy;
  double oracle_energy;
  int oracle_converged;
  double oracle_gradient_norm;
  size_t oracle_iterations;
  int energy_dominance;
  int pass;
} rbv_agreement;

RBV_API rbv_status rbv_oracle_agreement(const rbv_density* d, const rbv_problem* p, const rbv_oracle_config* cfg,
                                        const rbv_agreement_thresholds* thresholds, rbv_agreement* out);

typedef struct rbv_regularization_entry {
  double delta;
  double l1_distance;
  double energy;
  int ok;
} rbv_regularization_entry;

/* Fills out[0..count); a failed delta has ok = 0 and does not fail the call. */
RBV_API rbv_status rbv_regularization_study(const rbv_density* d, const rbv_problem* p, const double* deltas,
                                            size_t count, const rbv_oracle_config* cfg,
                                            rbv_regularization_entry* out);

/* ---- studies ------------------------------------------------------------ */

typedef struct rbv_trace_study rbv_trace_study;

typedef struct rbv_trace_study_summary {
  size_t count;
  int has_saturation_level;
  double saturation_level;
  int monotone;
  int above_data;
  int saturation_ok;
  double saturation_trace_spread;
  double saturation_profile_linf;
  int formula_confirmed;
  double formula_max_error;
  int lipschitz_ok;
  int pass;
} rbv_trace_study_summary;

RBV_API rbv_status rbv_trace_study_run(const rbv_density* d, double rho1, double rho2, double m2,
                                       const double* zetas, size_t count, const rbv_solver_options* opt,
                                       size_t threads, rbv_trace_study** out);
RBV_API void rbv_trace_study_free(rbv_trace_study* s);
RBV_API rbv_status rbv_trace_study_get_summary(const rbv_trace_study* s, rbv_trace_study_summary* out);
RBV_API rbv_status rbv_trace_study_point(const rbv_trace_study* s, size_t i, double* zeta, double* trace,
                                         int* attained);

typedef struct rbv_sweep_config {
  uint64_t seed;
  size_t count;
  /* 0 selects the available parallelism */
  size_t threads;
  rbv_solver_options solver;
} rbv_sweep_config;

RBV_API rbv_sweep_config rbv_sweep_config_default(void);

typedef struct rbv_sweep_point {
  double rho1;
  double rho2;
  double mu;
  double m1;
  double m2;
  int ok;
  int attained;
  int classified_attained;
  double lambda;
  double trace_inner;
  double delta_m_inf;
  int delta_m_infinite;
  double energy;
  int max_principle;
  int lower_bound;
} rbv_sweep_point;

typedef struct rbv_sweep_summary {
  size_t count;
  size_t failures;
  size_t classification_mismatches;
  size_t max_principle_violations;
  size_t lower_bound_violations;
  int pass;
} rbv_sweep_summary;

typedef struct rbv_sweep rbv_sweep;

RBV_API rbv_status rbv_sweep_run(const rbv_sweep_config* cfg, rbv_sweep** out);
RBV_API void rbv_sweep_free(rbv_sweep* s);
RBV_API rbv_status rbv_sweep_get_summary(const rbv_sweep* s, rbv_sweep_summary* out);
RBV_API rbv_status rbv_sweep_point_at(const rbv_sweep* s, size_t i, rbv_sweep_point* out);
/* Error message of a failed point; "" for successful points. Valid while the
 * sweep lives. */
RBV_API rbv_status rbv_sweep_point_error(const rbv_sweep* s, size_t i, const char** message);

typedef struct rbv_verify_config {
  uint64_t seed;
  size_t sweep_count;
  size_t oracle_count;
  size_t oracle_cells;
  size_t density_samples;
  size_t threads;
} rbv_verify_config;

RBV_API rbv_verify_config rbv_verify_config_default(void);

typedef struct rbv_verify rbv_verify;

RBV_API rbv_status rbv_verify_run(const rbv_verify_config* cfg, rbv_verify** out);
RBV_API void rbv_verify_free(rbv_verify* v);
RBV_API rbv_status rbv_verify_check_count(const rbv_verify* v, size_t* out);
RBV_API rbv_status rbv_verify_pass(const rbv_verify* v, int* pass);
/* Strings stay valid while the report lives. */
RBV_API rbv_status rbv_verify_check(const rbv_verify* v, size_t i, const char** name, int* pass,
                                    const char** detail, size_t* metric_count);
RBV_API rbv_status rbv_verify_metric(const rbv_verify* v, size_t check, size_t j, const char** name,
                                     double* value);

#ifdef __cplusplus
}
#endif

#endif
