#pragma once

// Linear-growth, mu-elliptic energy densities g : [0, inf) -> [0, inf).
//
// Every density is convex with g(0) = g'(0) = 0, g' strictly increasing and
// bounded by the recession slope g'_inf, and its curvature satisfies
//
//     nu1 (1+t)^(-mu) <= g''(t) <= nu2 (1+t)^(-mu_bar),   mu - mu_bar < 2.
//
// All operations work on the radial scalar t = |p|; the planar integrand is
// G(p) = g(|p|) and its recession function is g'_inf |p|.

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>

namespace radial_bv {

enum class DensityFamily { PhiMu, GTildeK, MinimalSurface, CustomPsi, Regularized };

std::string to_string(DensityFamily family);

/// Curvature function psi for the CustomPsi family; g'' = psi.
using PsiFunction = std::function<double(double)>;

namespace detail {
class DensityModel;
}

class EnergyDensity {
 public:
  /// (mu-1) times the double integral of (1+r)^(-mu); g'_inf = 1.
  static EnergyDensity phi_mu(double mu);
  /// (1 + t^k)^(1/k) - 1; tail exponent mu = k + 1, g'_inf = 1.
  static EnergyDensity g_tilde_k(double k);
  /// sqrt(1 + t^2) - 1, carried with (mu, mu_bar) = (3, 3).
  static EnergyDensity minimal_surface();
  /// g = double integral of psi. psi must be continuous and positive with
  /// c1 (1+t)^(-mu) <= psi(t) <= c2 (1+t)^(-mu_bar). The recession slope is
  /// estimated from the tail of the integral and flagged as such.
  static EnergyDensity custom_psi(PsiFunction psi, double mu, double mu_bar);

  DensityFamily family() const;

  double g(double t) const;
  double g_prime(double t) const;
  double g_second(double t) const;

  /// g'_inf - g'(t), evaluated without cancellation.
  double g_prime_deficit(double t) const;

  /// The unique t >= 0 with g'(t) = s, for 0 <= s < g'_inf (1 - 1e-14).
  double inv_g_prime(double s) const;

  /// The unique t >= 0 with g'_inf - g'(t) = gap. Returns +inf at gap == 0,
  /// which is how the singular limit s -> g'_inf is reached by integrators.
  double inv_g_prime_deficit(double gap) const;

  double g_prime_inf() const;
  bool g_prime_inf_estimated() const;
  double mu() const;
  double mu_bar() const;

  /// mu for PhiMu, k for GTildeK; NaN otherwise.
  double shape_parameter() const;
  /// Regularized only: the wrapped density and the (delta, tau) pair.
  std::optional<EnergyDensity> base() const;
  double delta() const;
  double tau() const;

  std::string describe() const;

 private:
  explicit EnergyDensity(std::shared_ptr<const detail::DensityModel> model);
  friend EnergyDensity make_regularized(const EnergyDensity&, double, double);

  std::shared_ptr<const detail::DensityModel> model_;
};

/// g_delta = delta * Phi_tau + g with delta in (0,1) and tau in
/// (max(mu - 1, 1), mu_bar) of the base density.
EnergyDensity make_regularized(const EnergyDensity& base, double delta, double tau);

/// Admissible open window for tau, and its midpoint (the default choice).
struct TauWindow {
  double lower;
  double upper;
  bool empty() const { return !(lower < upper); }
  double midpoint() const { return 0.5 * (lower + upper); }
};
TauWindow regularization_window(const EnergyDensity& base);

/// Phi_mu and its derivatives as free functions; used by PhiMu and by the
/// delta * Phi_tau shift of regularized densities.
double phi(double mu, double t);
double phi_prime(double mu, double t);
double phi_second(double mu, double t);
double phi_deficit(double mu, double t);

struct EllipticityResult {
  bool ok = false;
  double nu1 = 0.0;
  double nu2 = 0.0;
  std::string failure;
};

/// Tightest constants nu1 = min g''(t)(1+t)^mu and nu2 = max g''(t)(1+t)^mu_bar
/// over the grid. A nonpositive or non-finite constant is reported as a
/// failure, not thrown.
EllipticityResult verify_ellipticity(const EnergyDensity& d, std::span<const double> t_grid);
EllipticityResult verify_ellipticity(const EnergyDensity& d, std::span<const double> t_grid, double mu,
                                     double mu_bar);

}  // namespace radial_bv
