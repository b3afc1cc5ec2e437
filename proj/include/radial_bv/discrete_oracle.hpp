#pragma once

// Independent check on the radial solver: minimizes the discretized relaxed
// energy directly over continuous piecewise-linear radial functions. Nothing
// here knows about the flux law; the only inputs are g, g', g'' and the data.
//
//   E[u] = sum_i 2 pi r_{i+1/2} h_i g(|u_{i+1} - u_i| / h_i)
//        + g'_inf 2 pi rho1 pen(u_0 - m1) + g'_inf 2 pi rho2 pen(u_N - m2),
//
// pen(x) = sqrt(x^2 + eps^2). The regularized variants replace g by
// g + delta Phi_tau (DensityReg), or add delta/2 |u'|^2 and pin both boundary
// values (QuadraticReg).

#include "radial_bv/radial_solver.hpp"

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace radial_bv {

enum class OracleMode { Relaxed, QuadraticReg, DensityReg };

std::string to_string(OracleMode mode);

struct OracleConfig {
  std::size_t cells = 2048;
  double penalty_smoothing = 1e-8;
  double tol = 1e-10;
  /// Newton iterations per smoothing stage
  std::size_t max_iters = 500;
  OracleMode mode = OracleMode::Relaxed;
  double delta = 0.0;
  /// DensityReg exponent; NaN selects the midpoint of the admissible window
  double tau = std::numeric_limits<double>::quiet_NaN();
  double grading = 3.0;

  void validate() const;
};

struct DiscreteRadialFunction {
  std::vector<double> nodes;
  std::vector<double> values;

  void validate() const;
};

struct OracleResult {
  DiscreteRadialFunction f;
  /// objective with the exact |.| in the penalties
  double energy = 0.0;
  double gradient_norm = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  /// unsmoothed objective after every accepted Newton step
  std::vector<double> energy_history;
};

/// Nodes of the oracle grid; identical to the solver's profile grid with
/// grid_nodes = cells + 1 and the same grading.
std::vector<double> oracle_nodes(const RadialProblem& p, const OracleConfig& cfg);

/// The discrete objective for cfg.mode with smoothing cfg.penalty_smoothing
/// (0 gives the exact absolute value). QuadraticReg returns +inf for
/// functions that miss the boundary values.
double discrete_energy(const RadialProblem& p, const DiscreteRadialFunction& f, const OracleConfig& cfg);

/// Minimizes the convex discrete objective. Without `initial` the iteration
/// starts from the point solving the discrete stationarity conditions (equal
/// cell fluxes, balanced boundary nodes); with it, damped Newton runs from the
/// given values with continuation in the penalty smoothing. Either way the
/// result is certified by the nodal gradient norm; non-convergence is
/// reported through `converged` with the last iterate.
OracleResult minimize(const RadialProblem& p, const OracleConfig& cfg,
                      std::optional<std::span<const double>> initial = std::nullopt);

struct RegularizationEntry {
  double delta = 0.0;
  double l1_distance = 0.0;
  double energy = 0.0;
  bool ok = false;
  std::string error;
};

/// For each delta: minimize in cfg.mode (QuadraticReg or DensityReg) and
/// report 2 pi int |u_delta - u| r dr against the radial solver's solution.
std::vector<RegularizationEntry> regularization_study(const RadialProblem& p, std::span<const double> deltas,
                                                      const OracleConfig& cfg);

/// 2 pi int |a - b| r dr by the trapezoid rule on shared nodes.
double weighted_l1(std::span<const double> nodes, std::span<const double> a, std::span<const double> b);

}  // namespace radial_bv
