#pragma once

// Executable checks of the qualitative properties of radial minimizers and
// the parameter studies built on them: maximum principle, lower bound, trace
// monotonicity and saturation, the attainment rule, agreement with the
// discrete oracle, density self-consistency and randomized sweeps.

#include "radial_bv/discrete_oracle.hpp"
#include "radial_bv/radial_solver.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace radial_bv {

struct Witness {
  double r = 0.0;
  double u = 0.0;
};

struct CheckResult {
  bool pass = true;
  std::optional<Witness> witness;
};

/// |u| <= max(|m1|, |m2|) + 1e-12 at every profile node.
CheckResult check_max_principle(const RadialProblem& p, const RadialSolution& sol);

/// sign * u >= sign * m1 - 1e-12 at every profile node, sign = sign(m2 - m1).
CheckResult check_lower_bound(const RadialProblem& p, const RadialSolution& sol);

struct TraceStudy {
  EnergyDensity density;
  double rho1 = 1.0;
  double rho2 = 2.0;
  double m2 = 0.0;
  std::vector<double> zetas;
  std::vector<double> traces;
  std::vector<bool> attained;
  /// m2 - Delta m_inf when Delta m_inf is finite
  std::optional<double> saturation_level;

  /// traces non-decreasing in zeta
  bool monotone = true;
  /// every trace >= its zeta
  bool above_data = true;
  /// saturated zetas share the trace and the profile
  bool saturation_ok = true;
  double saturation_trace_spread = 0.0;
  double saturation_profile_linf = 0.0;
  /// trace(zeta) = max(zeta, m2 - Delta m_inf) within 1e-8
  bool formula_confirmed = true;
  double formula_max_error = 0.0;
  /// trace(z2) - trace(z1) <= z2 - z1 (+1e-9)
  bool lipschitz_ok = true;

  /// The properties that are always asserted: monotone, above data and
  /// saturation. Lipschitz and the formula are empirical.
  bool pass() const { return monotone && above_data && saturation_ok; }
};

/// Solves the problem with m1 = zeta for every zeta (strictly increasing, all
/// below m2). A solver failure aborts the study with an Error naming zeta.
TraceStudy trace_monotonicity_study(const EnergyDensity& density, double rho1, double rho2, double m2,
                                    std::span<const double> zetas, const SolverOptions& opt = {},
                                    std::size_t threads = 1);

struct BoundaryBehavior {
  bool attained = true;
  DeltaM delta_m_inf;
  /// inner trace and |m2 - m1| - Delta m_inf; meaningful only when not attained
  double trace_inner = 0.0;
  double gap_paid = 0.0;
};

/// The attainment rule |m2 - m1| < Delta m_inf, evaluated without solving.
BoundaryBehavior classify_boundary_behavior(const RadialProblem& p, const SolverOptions& opt = {});

struct AgreementThresholds {
  double linf_attained = 5e-3;
  double linf_not_attained = 1e-2;
  double energy_gap = 1e-3;
};

struct AgreementReport {
  bool attained = true;
  double linf = 0.0;
  double l1 = 0.0;
  /// |E_oracle - E_solver| / |E_solver| (0 when both vanish)
  double energy_gap = 0.0;
  double solver_energy = 0.0;
  double oracle_energy = 0.0;
  bool oracle_converged = false;
  double oracle_gradient_norm = 0.0;
  std::size_t oracle_iterations = 0;
  /// no oracle iterate has energy below the solver's (minus 1e-9 (1 + E))
  bool energy_dominance = true;
  bool pass = false;
};

/// Solves on the oracle grid (cells + 1 nodes, same grading), minimizes the
/// discrete energy and compares node by node.
AgreementReport oracle_agreement(const RadialProblem& p, const OracleConfig& cfg = {},
                                 const AgreementThresholds& thresholds = {});

/// Density self-consistency on random samples of t: finite differences,
/// inverse round trips, monotonicity, convexity, recession limit, ellipticity
/// and the Phi sandwich.
struct DensityCheck {
  std::string density;
  std::size_t samples = 0;
  double fd_g_prime_max_rel = 0.0;
  double fd_g_second_max_rel = 0.0;
  double inverse_max_rel = 0.0;
  bool monotone = true;
  bool below_g_prime_inf = true;
  bool convex = true;
  bool origin_ok = true;
  /// g'(1e12) within 1e-6 of g'_inf; skipped for estimated slopes
  bool recession_ok = true;
  EllipticityResult ellipticity;
  bool ellipticity_checked = true;
  bool sandwich_ok = true;

  bool pass() const;
};

struct DensityCheckOptions {
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  /// verify the ellipticity pair carried by the density (off for GTildeK with
  /// k != 2, whose curvature degenerates or blows up at t = 0)
  bool check_ellipticity = true;
};

DensityCheck density_self_check(const EnergyDensity& d, const DensityCheckOptions& opt = {});

/// Uniform draws from mt19937_64 mapped by hand, so the sequence is the same
/// on every standard library (the std distributions are not).
class SweepRng {
 public:
  explicit SweepRng(std::uint64_t seed) : engine_(seed) {}
  /// [0, 1) with 53 random bits
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// index in [0, n)
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

 private:
  std::mt19937_64 engine_;
};

struct SweepProblem {
  double rho1 = 1.0;
  double rho2 = 2.0;
  double mu = 2.0;
  double m1 = 0.0;
  double m2 = 0.0;

  RadialProblem problem() const;
};

/// rho1 in [0.5, 2], rho2 / rho1 in [1.2, 4], mu in {1.5, 2, 2.5, 3, 4, 6},
/// |m2 - m1| in [0, 3 rho2], m1 in [-1, 1], random orientation.
std::vector<SweepProblem> random_problems(std::uint64_t seed, std::size_t count);

struct SweepPoint {
  SweepProblem params;
  bool ok = false;
  std::string error;
  bool attained = true;
  bool classified_attained = true;
  double lambda = 0.0;
  double trace_inner = 0.0;
  DeltaM delta_m_inf;
  double energy = 0.0;
  bool max_principle = true;
  bool lower_bound = true;
};

struct SweepConfig {
  std::uint64_t seed = 1;
  std::size_t count = 100;
  /// 0 selects the available parallelism
  std::size_t threads = 0;
  SolverOptions solver;
};

struct SweepReport {
  std::vector<SweepPoint> points;
  std::size_t failures = 0;
  std::size_t classification_mismatches = 0;
  std::size_t max_principle_violations = 0;
  std::size_t lower_bound_violations = 0;

  bool pass() const {
    return failures == 0 && classification_mismatches == 0 && max_principle_violations == 0 &&
           lower_bound_violations == 0;
  }
};

/// Results are indexed by problem, so they do not depend on the thread count.
SweepReport run_sweep(const SweepConfig& cfg);

/// Runs body(i) for i in [0, n) on `threads` workers (0 = available
/// parallelism). Exceptions propagate from the lowest failing index.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

struct VerifyCheck {
  std::string name;
  bool pass = false;
  std::string detail;
  /// named metrics in insertion order
  std::vector<std::pair<std::string, double>> metrics;
};

struct VerifyConfig {
  std::uint64_t seed = 1;
  std::size_t sweep_count = 100;
  std::size_t oracle_count = 20;
  std::size_t oracle_cells = 2048;
  std::size_t density_samples = 1000;
  std::size_t threads = 0;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool pass() const;
};

/// The full property suite: golden closed forms, the attainment dichotomy,
/// the mu = 3/2 and mu = 3 benchmarks, oracle agreement on random problems,
/// oracle restarts from distinct initial iterates,
/// maximum principle and lower bound over a sweep, trace monotonicity and
/// saturation, regularization convergence and density self-consistency.
VerifyReport run_verify(const VerifyConfig& cfg);

}  // namespace radial_bv
