#pragma once

// Quadrature helpers shared by the density cache and the radial solver.
//
// integrate_graded() handles integrands on [d_lo, d_hi] that may blow up
// like a power of d as d -> 0: the interval is cut into dyadic shells
// [d/2, d] and each shell goes to an adaptive Gauss-Kronrod rule. When the
// integrand is singular at d = 0 the shell contributions are watched for
// geometric decay, which is what separates an integrable singularity from a
// divergent one.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <algorithm>
#include <cstddef>
#include <limits>
#include <vector>

namespace radial_bv::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

/// Globally adaptive 21-point Gauss-Kronrod: the interval with the largest
/// error estimate is bisected until the summed estimate drops below
/// max(rel_tol |I|, round-off floor) or max_intervals is reached.
template <class F>
Result integrate(F&& f, double a, double b, double rel_tol, std::size_t max_intervals = 400) {
  if (!(b > a)) return {};
  using Rule = boost::math::quadrature::gauss_kronrod<double, 21>;
  struct Piece {
    double a, b, value, error, l1;
  };
  auto eval = [&](double lo, double hi) {
    Piece p{lo, hi, 0.0, 0.0, 0.0};
    p.value = Rule::integrate(f, lo, hi, 0, 0.0, &p.error, &p.l1);
    // the non-adaptive rule reports |K - G| on the reference interval [-1, 1]
    p.error *= 0.5 * (hi - lo);
    return p;
  };
  auto worse = [](const Piece& x, const Piece& y) { return x.error < y.error; };

  std::vector<Piece> heap{eval(a, b)};
  double value = heap.front().value;
  double error = heap.front().error;
  double l1 = heap.front().l1;
  constexpr double kRoundoff = 50.0 * std::numeric_limits<double>::epsilon();
  while (error > std::max(rel_tol * std::abs(value), kRoundoff * l1)) {
    if (heap.size() >= max_intervals || !std::isfinite(value)) return {value, error, false};
    std::pop_heap(heap.begin(), heap.end(), worse);
    const Piece worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) return {value, error, false};
    const Piece left = eval(worst.a, mid);
    const Piece right = eval(mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    l1 += left.l1 + right.l1 - worst.l1;
    for (const Piece& p : {left, right}) {
      heap.push_back(p);
      std::push_heap(heap.begin(), heap.end(), worse);
    }
  }
  return {value, error, true};
}

struct GradedOptions {
  double rel_tol = 1e-12;
  /// shells examined when the integrand is singular at d = 0
  std::size_t max_singular_shells = 60;
  /// a run of this many consecutive shell ratios >= divergence_ratio means +inf
  double divergence_ratio = 0.999;
  std::size_t divergence_run = 10;
};

struct GradedResult {
  double value = 0.0;
  bool divergent = false;
  std::size_t shells = 0;
  /// ratio of the last two shell contributions (NaN when fewer than two)
  double last_ratio = std::numeric_limits<double>::quiet_NaN();
};

/// Integrates f over [d_lo, d_hi] with 0 <= d_lo < d_hi, splitting dyadically
/// toward d = 0. Set singular_at_zero when f(d) -> inf as d -> 0; only then is
/// the divergence classifier armed and the tail below the last shell
/// extrapolated geometrically.
template <class F>
GradedResult integrate_graded(F&& f, double d_lo, double d_hi, bool singular_at_zero,
                              const GradedOptions& opt = {}) {
  GradedResult out;
  if (!(d_hi > d_lo)) return out;

  const bool to_zero = d_lo <= 0.0;
  double upper = d_hi;
  double sum = 0.0;
  double prev = std::numeric_limits<double>::quiet_NaN();
  std::size_t run = 0;
  constexpr std::size_t kRegularShellCap = 2000;

  for (;;) {
    double lower = 0.5 * upper;
    if (!to_zero && lower <= d_lo) {
      sum += integrate(f, d_lo, upper, opt.rel_tol).value;
      ++out.shells;
      out.value = sum;
      return out;
    }
    if (to_zero && singular_at_zero && out.shells == opt.max_singular_shells) break;

    const double c = integrate(f, lower, upper, opt.rel_tol).value;
    ++out.shells;
    if (!std::isfinite(c)) {
      out.divergent = true;
      out.value = std::numeric_limits<double>::infinity();
      return out;
    }
    if (prev == prev && prev != 0.0) {
      out.last_ratio = c / prev;
      if (singular_at_zero && to_zero) {
        run = out.last_ratio >= opt.divergence_ratio ? run + 1 : 0;
        if (run >= opt.divergence_run) {
          out.divergent = true;
          out.value = std::numeric_limits<double>::infinity();
          return out;
        }
      }
    }
    sum += c;
    prev = c;
    upper = lower;

    if (to_zero && !singular_at_zero) {
      // bounded integrand: shells decay like 1/2 once below its length scale
      const bool negligible = std::abs(c) <= 1e-17 * std::abs(sum);
      if (c == 0.0 || (negligible && out.last_ratio < 0.75) || out.shells >= kRegularShellCap ||
          upper == 0.0) {
        sum += integrate(f, 0.0, upper, opt.rel_tol).value;
        out.value = sum;
        return out;
      }
    }
  }

  // singular integrand, shells exhausted: geometric tail below `upper`
  const double q = out.last_ratio;
  if (!(q < 1.0) || !(q >= 0.0)) {
    out.divergent = true;
    out.value = std::numeric_limits<double>::infinity();
    return out;
  }
  out.value = sum + prev * q / (1.0 - q);
  return out;
}

}  // namespace radial_bv::quad
