#pragma once

// Reference computations for the tests, written without the library: closed
// forms for Phi_mu, composite Simpson with a singularity-removing substitution,
// bisection and central differences.

#include <cmath>
#include <functional>
#include <limits>

namespace ref {

/// Phi_mu(t) = (mu-1) int_0^t int_0^s (1+r)^(-mu) dr ds in closed form.
inline double phi(double mu, double t) {
  if (mu == 2.0) return t - std::log1p(t);
  return t - (std::pow(1.0 + t, 2.0 - mu) - 1.0) / (2.0 - mu);
}

inline double phi_prime(double mu, double t) { return 1.0 - std::pow(1.0 + t, 1.0 - mu); }

inline double phi_second(double mu, double t) { return (mu - 1.0) * std::pow(1.0 + t, -mu); }

/// |u'| solving r g'(|u'|) = lambda for Phi_mu.
inline double phi_slope(double mu, double lambda, double r) {
  return std::pow(r / (r - lambda), 1.0 / (mu - 1.0)) - 1.0;
}

/// Antiderivative of phi_slope for mu in {3/2, 2, 3}, derived by hand.
inline double phi_slope_antiderivative(double mu, double lambda, double r) {
  if (mu == 1.5) return 2.0 * lambda * std::log(r - lambda) - lambda * lambda / (r - lambda);
  if (mu == 2.0) return lambda * std::log(r - lambda);
  if (mu == 3.0) return std::sqrt(r * (r - lambda)) + lambda * std::log(std::sqrt(r) + std::sqrt(r - lambda)) - r;
  return std::numeric_limits<double>::quiet_NaN();
}

/// u(r) = m2 - int_r^rho2 u'(s) ds for an increasing profile.
inline double phi_profile(double mu, double lambda, double r, double rho2, double m2) {
  return m2 - (phi_slope_antiderivative(mu, lambda, rho2) - phi_slope_antiderivative(mu, lambda, r));
}

/// Delta m_inf of Phi_3 on (1, 2).
inline double delta_m_inf_mu3() { return std::sqrt(2.0) + 0.5 * std::log(3.0 + 2.0 * std::sqrt(2.0)) - 1.0; }

/// Composite Simpson on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

/// int_0^w f(d) dd for f with an integrable singularity at d = 0, through
/// d = w x^p, which flattens a d^(-q) blow-up for p (1-q) > 1. f takes the
/// offset d so that tiny offsets keep their digits.
inline double simpson_singular(const std::function<double(double)>& f, double w, int n, double p) {
  auto g = [&](double x) {
    if (x <= 0.0) return 0.0;
    return f(w * std::pow(x, p)) * w * p * std::pow(x, p - 1.0);
  };
  return simpson(g, 0.0, 1.0, n);
}

/// Root of an increasing function on [lo, hi] by plain bisection.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double central_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace ref
