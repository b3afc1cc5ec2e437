#include "radial_bv/radial_solver.hpp"

#include "radial_bv/error.hpp"
#include "radial_bv/quadrature.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <limits>
#include <numbers>

namespace radial_bv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// |u'| as a function of the offset d = r - rho1. The deficit form keeps full
// relative precision when lambda / r approaches g'_inf, which is where the
// profile steepens.
class FluxSlope {
 public:
  FluxSlope(const RadialProblem& p, double lambda)
      : g_(p.density), rho1_(p.rho1), lambda_(lambda), ginf_(p.density.g_prime_inf()) {
    const double max_flux = p.max_flux();
    if (!(lambda >= 0.0) || lambda > max_flux)
      throw_domain("flux lambda = " + show(lambda) + " outside [0, rho1 g'_inf]");
    slack_ = max_flux - lambda;
  }

  /// Flux given by its distance below the maximal flux.
  static FluxSlope from_slack(const RadialProblem& p, double slack) {
    FluxSlope f(p, std::max(0.0, p.max_flux() - slack));
    f.slack_ = slack;
    return f;
  }

  double operator()(double d) const {
    if (lambda_ == 0.0) return 0.0;
    const double r = rho1_ + d;
    const double gap = (ginf_ * d + slack_) / r;
    if (gap < 0.5 * ginf_) return g_.inv_g_prime_deficit(gap);
    return g_.inv_g_prime(lambda_ / r);
  }

  /// u' blows up at r = rho1 exactly when the flux is maximal.
  bool singular() const { return lambda_ > 0.0 && slack_ == 0.0; }

 private:
  const EnergyDensity& g_;
  double rho1_;
  double lambda_;
  double ginf_;
  double slack_ = 0.0;
};

quad::GradedOptions graded_options(const SolverOptions& opt) {
  quad::GradedOptions g;
  g.rel_tol = opt.quad_tol;
  return g;
}

std::vector<double> graded_offsets(double width, std::size_t cells, double grading) {
  std::vector<double> d(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i)
    d[i] = width * std::pow(static_cast<double>(i) / static_cast<double>(cells), grading);
  d[cells] = width;
  return d;
}

double height_gain(const RadialProblem& p, const FluxSlope& slope, const SolverOptions& opt) {
  const auto res = quad::integrate_graded(slope, 0.0, p.width(), slope.singular(), graded_options(opt));
  return res.divergent ? kInf : res.value;
}

void validate_options(const SolverOptions& opt) {
  if (opt.grid_nodes < 2) throw_invalid("profile grid needs at least 2 nodes");
  if (!(opt.grading >= 1.0)) throw_invalid("grid grading exponent must be >= 1");
  if (!(opt.quad_tol > 0.0)) throw_invalid("quadrature tolerance must be positive");
}

RadialSolution assemble(const RadialProblem& p, double slack, bool attained, double trace_inner, DeltaM dinf,
                        const SolverOptions& opt) {
  RadialSolution sol;
  sol.lambda = std::max(0.0, p.max_flux() - slack);
  sol.flux_slack = slack;
  sol.sign = p.sign();
  sol.attained_inner = attained;
  sol.trace_inner = trace_inner;
  sol.trace_outer = p.m2;
  sol.delta_m_inf = dinf;
  sol.options = opt;

  const FluxSlope slope = FluxSlope::from_slack(p, slack);
  const std::size_t cells = opt.grid_nodes - 1;
  const auto d = graded_offsets(p.width(), cells, opt.grading);
  const auto r = graded_nodes(p.rho1, p.rho2, cells, opt.grading);

  sol.profile.resize(cells + 1);
  double u = p.m2;
  for (std::size_t i = cells + 1; i-- > 0;) {
    auto& node = sol.profile[i];
    node.r = r[i];
    if (i < cells) {
      const auto piece = quad::integrate_graded(slope, d[i], d[i + 1], slope.singular() && i == 0, graded_options(opt));
      if (piece.divergent) throw_numeric("profile increment diverged on [" + show(r[i]) + ", " +
                                         show(r[i + 1]) + "]");
      u -= sol.sign * piece.value;
    }
    node.u = u;
    const double du = slope(d[i]);
    node.du_capped = !(du <= opt.slope_cap);
    node.du = sol.sign * (node.du_capped ? opt.slope_cap : du);
  }
  // the inner node carries the exact trace; interior nodes come from the
  // cumulative quadrature anchored at rho2
  sol.profile.front().u = trace_inner;
  sol.profile.back().u = p.m2;

  sol.energy = energy(p, sol);
  return sol;
}

}  // namespace

void RadialProblem::validate() const {
  if (!(rho1 > 0.0) || !std::isfinite(rho1)) throw_invalid("rho1 must be positive and finite");
  if (!(rho2 > rho1) || !std::isfinite(rho2)) throw_invalid("rho2 must be finite and exceed rho1");
  if (!std::isfinite(m1) || !std::isfinite(m2)) throw_invalid("boundary data m1, m2 must be finite");
}

double RadialProblem::gap() const { return std::abs(m2 - m1); }

std::vector<double> graded_nodes(double rho1, double rho2, std::size_t cells, double grading) {
  if (cells == 0) throw_invalid("graded grid needs at least one cell");
  const auto d = graded_offsets(rho2 - rho1, cells, grading);
  std::vector<double> r(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) r[i] = rho1 + d[i];
  r.front() = rho1;
  r.back() = rho2;
  return r;
}

double delta_m(const RadialProblem& p, double lambda, const SolverOptions& opt) {
  p.validate();
  const FluxSlope slope(p, lambda);
  if (lambda == 0.0) return 0.0;
  return height_gain(p, slope, opt);
}

DeltaM delta_m_infinity(const RadialProblem& p, const SolverOptions& opt) {
  const double v = delta_m(p, p.max_flux(), opt);
  return {v, std::isinf(v)};
}

RadialSolution solve_with_flux(const RadialProblem& p, double lambda, const SolverOptions& opt) {
  p.validate();
  validate_options(opt);
  const DeltaM dinf = delta_m_infinity(p, opt);
  const double dm = delta_m(p, lambda, opt);
  if (std::isinf(dm)) throw_numeric("the prescribed flux produces an infinite height gain");
  const double trace = p.m2 - p.sign() * dm;
  const bool attained = std::abs(trace - p.m1) <= 1e-10 * std::max(1.0, p.gap());
  return assemble(p, p.max_flux() - lambda, attained, trace, dinf, opt);
}

RadialSolution solve(const RadialProblem& p, const SolverOptions& opt) {
  p.validate();
  validate_options(opt);
  const DeltaM dinf = delta_m_infinity(p, opt);
  const double gap = p.gap();

  if (gap == 0.0) return assemble(p, p.max_flux(), true, p.m1, dinf, opt);

  if (!dinf.infinite && !(dinf.value > gap)) {
    // the inner datum is out of reach: maximal flux, detached inner trace
    return assemble(p, 0.0, false, p.m2 - p.sign() * dinf.value, dinf, opt);
  }

  // Delta m is strictly increasing in lambda and crosses gap; the root is
  // bracketed in log(slack), slack = rho1 g'_inf - lambda, which resolves
  // fluxes close to the maximum
  const double max_flux = p.max_flux();
  double best_slack = max_flux;
  double best_res = gap;
  auto residual = [&](double w) {
    const double slack = std::exp(w);
    const double dm = height_gain(p, FluxSlope::from_slack(p, slack), opt);
    const double res = dm - gap;
    if (std::abs(res) < best_res) {
      best_res = std::abs(res);
      best_slack = slack;
    }
    return res;
  };
  const double w_hi = std::log(max_flux);
  double w_lo = std::log(0.5 * max_flux);
  double f_lo = residual(w_lo);
  while (!(f_lo > 0.0) && w_lo > -700.0) {
    w_lo -= 4.0;
    f_lo = residual(w_lo);
  }
  if (f_lo > 0.0) {
    std::uintmax_t iters = opt.max_root_iters;
    // stop once the residual is at the quadrature accuracy
    auto tol = [&](double a, double b) {
      return best_res <= 10.0 * opt.quad_tol * std::max(1.0, gap) ||
             std::abs(b - a) <= 4e-16 * std::max(1.0, std::abs(a));
    };
    boost::math::tools::toms748_solve(residual, w_lo, w_hi, f_lo, -gap, tol, iters);
  }
  if (!(best_res <= 1e-9 * std::max(1.0, gap)))
    throw_numeric("flux root search stalled: |Delta m(lambda) - gap| = " + show(best_res));
  return assemble(p, best_slack, true, p.m1, dinf, opt);
}

ProfilePoint profile_at(const RadialSolution& sol, const RadialProblem& p, double r) {
  if (!(r >= p.rho1 && r <= p.rho2)) throw_domain("profile_at: r outside [rho1, rho2]");
  const FluxSlope slope = FluxSlope::from_slack(p, sol.flux_slack);
  const double d = r - p.rho1;
  const auto res = quad::integrate_graded(slope, d, p.width(), slope.singular() && d == 0.0,
                                          graded_options(sol.options));
  if (res.divergent) throw_numeric("profile integral diverged");
  ProfilePoint pt;
  pt.u = p.m2 - sol.sign * res.value;
  const double du = slope(d);
  pt.du_capped = !(du <= sol.options.slope_cap);
  pt.du = sol.sign * (pt.du_capped ? sol.options.slope_cap : du);
  return pt;
}

EnergyBreakdown energy(const RadialProblem& p, const RadialSolution& sol) {
  EnergyBreakdown e;
  const FluxSlope slope = FluxSlope::from_slack(p, sol.flux_slack);
  if (sol.lambda > 0.0) {
    const auto& g = p.density;
    auto integrand = [&](double d) { return g.g(slope(d)) * (p.rho1 + d); };
    const auto res = quad::integrate_graded(integrand, 0.0, p.width(), slope.singular(), graded_options(sol.options));
    if (res.divergent) throw_numeric("bulk energy integral diverged");
    e.bulk = kTwoPi * res.value;
  }
  const double ginf = p.density.g_prime_inf();
  e.singular = 0.0;
  e.penalty_inner = sol.attained_inner ? 0.0 : ginf * kTwoPi * p.rho1 * std::abs(sol.trace_inner - p.m1);
  e.penalty_outer = ginf * kTwoPi * p.rho2 * std::abs(sol.trace_outer - p.m2);
  e.total = e.bulk + e.singular + e.penalty_inner + e.penalty_outer;
  return e;
}

double node_flux(const RadialProblem& p, const ProfileNode& node) {
  return node.r * p.density.g_prime(std::abs(node.du));
}

double closed_form_profile(ClosedFormExponent mu, double lambda, double r, double rho2) {
  if (!(lambda >= 0.0)) throw_domain("closed form: lambda must be >= 0");
  switch (mu) {
    case ClosedFormExponent::ThreeHalves: {
      if (!(r > lambda && rho2 > lambda)) throw_domain("closed form (mu = 3/2): requires r > lambda");
      const double a = r - lambda;
      const double b = rho2 - lambda;
      return 2.0 * lambda * std::log(a / b) - lambda * lambda * (1.0 / a - 1.0 / b);
    }
    case ClosedFormExponent::Two: {
      if (!(r > lambda && rho2 > lambda)) throw_domain("closed form (mu = 2): requires r > lambda");
      return lambda * std::log((r - lambda) / (rho2 - lambda));
    }
    case ClosedFormExponent::Three: {
      if (!(r >= lambda && rho2 >= lambda)) throw_domain("closed form (mu = 3): requires r >= lambda");
      auto f = [lambda](double x) {
        const double root = std::sqrt(x * (x - lambda));
        const double log_term = lambda == 0.0 ? 0.0 : 0.5 * lambda * std::log(2.0 * x - lambda + 2.0 * root);
        return root - x + log_term;
      };
      return f(r) - f(rho2);
    }
  }
  throw_domain("closed form: unsupported exponent");
}

}  // namespace radial_bv
