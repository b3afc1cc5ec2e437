#include "radial_bv/discrete_oracle.hpp"

#include "radial_bv/error.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace radial_bv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

EnergyDensity effective_density(const RadialProblem& p, const OracleConfig& cfg) {
  if (cfg.mode != OracleMode::DensityReg || cfg.delta == 0.0) return p.density;
  const double tau = std::isnan(cfg.tau) ? regularization_window(p.density).midpoint() : cfg.tau;
  return make_regularized(p.density, cfg.delta, tau);
}

double pen(double x, double eps) { return eps > 0.0 ? std::hypot(x, eps) : std::abs(x); }
double pen_d1(double x, double eps) { return x / std::hypot(x, eps); }
double pen_d2(double x, double eps) {
  const double h = std::hypot(x, eps);
  return eps * eps / (h * h * h);
}

// Neumaier summation.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

// Iterate in increment form: the inner value u0 and the per-cell rises
// rise[i] = u[i+1] - u[i]. Slopes rise[i] / h[i] are then exact even on the
// tiny cells next to rho1, where differencing nodal values would lose most
// of their digits.
struct Iterate {
  double u0 = 0.0;
  std::vector<double> rise;

  /// u0 + sum(rise), compensated: near the optimum the outer penalty's
  /// curvature ~ 1 / eps amplifies any summation error.
  double outer() const {
    CompensatedSum s;
    s.add(u0);
    for (double d : rise) s.add(d);
    return s.value();
  }
  std::vector<double> nodal() const {
    std::vector<double> u(rise.size() + 1);
    u[0] = u0;
    for (std::size_t i = 0; i < rise.size(); ++i) u[i + 1] = u[i] + rise[i];
    return u;
  }
  static Iterate from_nodal(std::span<const double> u) {
    Iterate it;
    it.u0 = u.front();
    it.rise.resize(u.size() - 1);
    for (std::size_t i = 0; i + 1 < u.size(); ++i) it.rise[i] = u[i + 1] - u[i];
    return it;
  }
};

// Damped Newton on an increasing residual R(d), starting at d = 0; applies
// the best offset found.
template <class R, class D, class Apply>
void polish_node(R residual, D derivative, Apply apply) {
  double d = 0.0;
  double best = std::abs(residual(0.0));
  for (int k = 0; k < 30 && best > 0.0; ++k) {
    const double slope = derivative(d);
    if (!(slope > 0.0) || !std::isfinite(slope)) break;
    double step = -residual(d) / slope;
    bool improved = false;
    for (int half = 0; half < 40 && !improved; ++half, step *= 0.5) {
      const double r = std::abs(residual(d + step));
      if (r < best) {
        best = r;
        d += step;
        improved = true;
      }
    }
    if (!improved) break;
  }
  if (d != 0.0) apply(d);
}

class Objective {
 public:
  Objective(const RadialProblem& p, const OracleConfig& cfg, std::vector<double> nodes)
      : g_(effective_density(p, cfg)), r_(std::move(nodes)), m1_(p.m1), m2_(p.m2) {
    const std::size_t cells = r_.size() - 1;
    h_.resize(cells);
    ring_.resize(cells);
    for (std::size_t i = 0; i < cells; ++i) {
      h_[i] = r_[i + 1] - r_[i];
      ring_[i] = kTwoPi * 0.5 * (r_[i] + r_[i + 1]);
    }
    dirichlet_ = cfg.mode == OracleMode::QuadraticReg;
    quad_delta_ = dirichlet_ ? cfg.delta : 0.0;
    ginf_ = g_.g_prime_inf();
    c_inner_ = ginf_ * kTwoPi * r_.front();
    c_outer_ = ginf_ * kTwoPi * r_.back();
    sign_ = p.m2 >= p.m1 ? 1.0 : -1.0;
  }

  std::size_t cells() const { return h_.size(); }
  bool dirichlet() const { return dirichlet_; }
  const std::vector<double>& nodes() const { return r_; }

  double value(const Iterate& it, double eps) const {
    double e = 0.0;
    for (std::size_t i = 0; i < h_.size(); ++i) {
      const double s = it.rise[i] / h_[i];
      e += ring_[i] * h_[i] * (g_.g(std::abs(s)) + 0.5 * quad_delta_ * s * s);
    }
    if (dirichlet_) return e;
    return e + c_inner_ * pen(it.u0 - m1_, eps) + c_outer_ * pen(it.outer() - m2_, eps);
  }

  /// Exact nodal objective, used for functions handed in from outside.
  double nodal_value(std::span<const double> u, double eps) const {
    if (dirichlet_ && (u.front() != m1_ || u.back() != m2_)) return kInf;
    return value(Iterate::from_nodal(u), eps);
  }

  /// Cell fluxes ring_i (G'(s_i) + q s_i).
  void fluxes(const Iterate& it, std::vector<double>& flux) const {
    flux.resize(h_.size());
    for (std::size_t i = 0; i < h_.size(); ++i) {
      const double s = it.rise[i] / h_[i];
      flux[i] = ring_[i] * (std::copysign(g_.g_prime(std::abs(s)), s) + quad_delta_ * s);
    }
  }

  /// Sup-norm of the gradient with respect to the nodal values. At the two
  /// boundary nodes the part explained by round-off in u_0 and u_N is
  /// discounted: with a smoothed penalty pen'' ~ 1 / eps amplifies it.
  double nodal_gradient_norm(const Iterate& it, double eps) const {
    std::vector<double> flux;
    fluxes(it, flux);
    double m = 0.0;
    for (std::size_t i = 1; i < flux.size(); ++i) m = std::max(m, std::abs(flux[i - 1] - flux[i]));
    if (!dirichlet_) {
      constexpr double kUlp = std::numeric_limits<double>::epsilon();
      double mass = std::abs(it.u0);
      for (double d : it.rise) mass += std::abs(d);
      const double x1 = it.u0 - m1_;
      const double x2 = it.outer() - m2_;
      const double slack1 = 4.0 * kUlp * (std::abs(it.u0) + std::abs(m1_)) * c_inner_ * pen_d2(x1, eps);
      const double slack2 = 8.0 * kUlp * (mass + std::abs(m2_)) * c_outer_ * pen_d2(x2, eps);
      m = std::max(m, std::abs(c_inner_ * pen_d1(x1, eps) - flux.front()) - slack1);
      m = std::max(m, std::abs(flux.back() + c_outer_ * pen_d1(x2, eps)) - slack2);
    }
    return m;
  }

  /// One-node Newton moves on u_0 and u_N with the interior nodes held. At the
  /// end of a solve the boundary residuals are governed by pen'' ~ 1 / eps,
  /// which the coupled Newton step resolves poorly once the energy has
  /// stopped changing in floating point.
  void polish_ends(Iterate& it, double eps) const {
    if (dirichlet_ || h_.empty()) return;
    const std::size_t last = h_.size() - 1;
    auto cell_flux = [&](double rise, std::size_t i) {
      const double s = rise / h_[i];
      return ring_[i] * std::copysign(g_.g_prime(std::abs(s)), s);
    };
    auto cell_curv = [&](double rise, std::size_t i) {
      return ring_[i] * std::min(g_.g_second(std::abs(rise / h_[i])), 1e300) / h_[i];
    };
    // node 0: u0 + d, rise[0] - d
    polish_node([&](double d) { return c_inner_ * pen_d1(it.u0 + d - m1_, eps) - cell_flux(it.rise[0] - d, 0); },
                [&](double d) { return c_inner_ * pen_d2(it.u0 + d - m1_, eps) + cell_curv(it.rise[0] - d, 0); },
                [&](double d) {
                  it.u0 += d;
                  it.rise[0] -= d;
                });
    // node N: rise[last] + d
    const double x2 = it.outer() - m2_;
    polish_node([&](double d) { return cell_flux(it.rise[last] + d, last) + c_outer_ * pen_d1(x2 + d, eps); },
                [&](double d) { return cell_curv(it.rise[last] + d, last) + c_outer_ * pen_d2(x2 + d, eps); },
                [&](double d) { it.rise[last] += d; });
  }

  /// d flux_i / d rise_i
  void curvatures(const Iterate& it, std::vector<double>& curv) const {
    curv.resize(h_.size());
    for (std::size_t i = 0; i < h_.size(); ++i) {
      double c = g_.g_second(std::abs(it.rise[i] / h_[i]));
      if (!(c <= 1e300)) c = 1e300;
      curv[i] = std::max(ring_[i] * (c + quad_delta_) / h_[i], 1e-300);
    }
  }

  /// Point at parameter a on the curve along which every cell flux follows
  /// its linearization F_i + a curv_i step_i. Where g' saturates this moves
  /// the slope much further than the straight Newton ray. Cells whose target
  /// flux is out of reach close part of their deficit instead; densities with
  /// a quadratic term move linearly, as does the stiffer boundary node.
  Iterate flux_path(const Iterate& it, const Iterate& step, double a, const std::vector<double>& flux,
                    const std::vector<double>& curv, double eps) const {
    Iterate out = it;
    out.u0 += a * step.u0;
    for (std::size_t i = 0; i < h_.size(); ++i) {
      const double linear = it.rise[i] + a * step.rise[i];
      const double target = (flux[i] + a * curv[i] * step.rise[i]) / ring_[i];
      double mag = std::abs(target);
      if (quad_delta_ > 0.0) {
        out.rise[i] = linear;
        continue;
      }
      if (!(mag < ginf_ * (1.0 - 1e-12))) {
        // out of reach: close part of the current deficit instead
        const double now = flux[i] / ring_[i];
        if (!(now * target > 0.0)) {
          out.rise[i] = linear;
          continue;
        }
        mag = ginf_ - (ginf_ - std::abs(now)) * (1.0 - 0.5 * a);
      }
      const double deficit = ginf_ - mag;
      const double s = deficit < 0.5 * ginf_ ? g_.inv_g_prime_deficit(deficit) : g_.inv_g_prime(mag);
      out.rise[i] = std::copysign(s * h_[i], target);
    }
    if (!dirichlet_ && outer_anchored(it, eps)) {
      // keep u_N on its linear path; the stiff outer penalty does not forgive
      // the drift of sum(rise), the soft inner one does
      CompensatedSum target;
      target.add(it.outer());
      target.add(a * step.u0);
      for (std::size_t i = 0; i < h_.size(); ++i) {
        target.add(a * step.rise[i]);
        target.add(-out.rise[i]);
      }
      out.u0 = target.value();
    }
    return out;
  }

  /// Whether the outer penalty is the stiffer one at `it` (see newton_step).
  bool outer_anchored(const Iterate& it, double eps) const {
    return c_inner_ * pen_d2(it.u0 - m1_, eps) < c_outer_ * pen_d2(it.outer() - m2_, eps);
  }

  /// Derivative of t -> value(it + t step) at t = 0.
  double directional(const Iterate& it, double eps, const Iterate& step) const {
    std::vector<double> flux;
    fluxes(it, flux);
    double d = 0.0;
    double rise_sum = 0.0;
    for (std::size_t i = 0; i < flux.size(); ++i) {
      d += flux[i] * step.rise[i];
      rise_sum += step.rise[i];
    }
    if (dirichlet_) return d;
    const double p2 = c_outer_ * pen_d1(it.outer() - m2_, eps);
    return d + c_inner_ * pen_d1(it.u0 - m1_, eps) * step.u0 + p2 * (step.u0 + rise_sum);
  }

  /// Newton direction and the directional derivative along it. The Hessian in
  /// (u0, rise) is diagonal plus the rank-one coupling of the outer penalty
  /// (or of the Dirichlet constraint sum(rise) = m2 - m1).
  double newton_step(const Iterate& it, double eps, Iterate& step, double damping = 0.0) const {
    const std::size_t n = h_.size();
    std::vector<double> flux;
    fluxes(it, flux);
    std::vector<double> curv;
    curvatures(it, curv);
    if (damping > 0.0) {
      const double top = *std::max_element(curv.begin(), curv.end());
      for (double& c : curv) c += damping * top;
    }
    step.rise.assign(n, 0.0);

    if (dirichlet_) {
      // minimize the quadratic model subject to sum(rise + step) = m2 - m1
      double residual = (m2_ - m1_) - (it.outer() - it.u0);
      double sum_inv = 0.0;
      double sum_grad = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        sum_inv += 1.0 / curv[i];
        sum_grad += flux[i] / curv[i];
      }
      const double nu = -(residual + sum_grad) / sum_inv;
      double slope = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        step.rise[i] = -(flux[i] + nu) / curv[i];
        slope += flux[i] * step.rise[i];
      }
      step.u0 = 0.0;
      return slope;
    }

    const double x1 = it.u0 - m1_;
    const double x2 = it.outer() - m2_;
    const double p1 = c_inner_ * pen_d1(x1, eps);
    const double p2 = c_outer_ * pen_d1(x2, eps);
    const double a1 = c_inner_ * pen_d2(x1, eps);
    const double a2 = c_outer_ * pen_d2(x2, eps);
    const double g0 = p1 + p2;

    // The Hessian is diagonal plus one penalty curvature times e e^T. The
    // stiffer penalty is anchored on the diagonal (through u0, or through u_N
    // with u0 = u_N - sum(rise)) so that the rank-one part is the softer one
    // and Sherman-Morrison does not cancel.
    const bool outer_anchor = outer_anchored(it, eps);
    const double d0 = outer_anchor ? std::max(a2, 1e-12 * c_outer_) : std::max(a1, 1e-12 * c_inner_);
    const double alpha = outer_anchor ? a1 : a2;
    const double sigma = outer_anchor ? -1.0 : 1.0;
    const double shift = outer_anchor ? -p1 : p2;

    double ey = -g0 / d0;
    double ez = 1.0 / d0;
    for (std::size_t i = 0; i < n; ++i) {
      ey -= sigma * (flux[i] + shift) / curv[i];
      ez += 1.0 / curv[i];
    }
    const double k = alpha * ey / (1.0 + alpha * ez);
    const double anchor = (-g0 - k) / d0;
    double slope = g0 * anchor;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double gi = flux[i] + shift;
      step.rise[i] = (-gi - sigma * k) / curv[i];
      slope += gi * step.rise[i];
      total += step.rise[i];
    }
    step.u0 = outer_anchor ? anchor - total : anchor;
    return slope;
  }

 private:
  EnergyDensity g_;
  std::vector<double> r_;
  std::vector<double> h_;
  std::vector<double> ring_;  // 2 pi r at cell midpoints
  double m1_;
  double m2_;
  bool dirichlet_ = false;
  double quad_delta_ = 0.0;
  double c_inner_ = 0.0;
  double c_outer_ = 0.0;
  double ginf_ = 0.0;
  double sign_ = 1.0;

  // Slope magnitude in cell i when every cell carries the flux
  // lmax - slack, lmax = g'_inf 2 pi ref. The deficit g'_inf - flux / ring
  // is formed from offsets so that it keeps its digits as slack -> 0.
  double saturating_slope(std::size_t i, double slack, double ref) const {
    const double offset = (r_[i] - r_.front()) + 0.5 * h_[i] - ref;
    const double deficit = (ginf_ * kTwoPi * offset + slack) / ring_[i];
    if (deficit <= 0.0) return kInf;
    if (deficit >= ginf_) return 0.0;
    if (deficit < 0.5 * ginf_) return g_.inv_g_prime_deficit(deficit);
    return g_.inv_g_prime(ginf_ - deficit);
  }

  // Slope magnitude solving ring (G'(s) + q s) = flux for q > 0.
  double quadratic_slope(std::size_t i, double flux) const {
    const double y = flux / ring_[i];
    if (y <= 0.0) return 0.0;
    const double lo = std::max(0.0, (y - ginf_) / quad_delta_);
    const double hi = y / quad_delta_;
    if (!(hi > lo)) return lo;
    auto f = [&](double t) { return g_.g_prime(t) + quad_delta_ * t - y; };
    std::uintmax_t iters = 200;
    const auto root = boost::math::tools::toms748_solve(f, lo, hi, f(lo), f(hi),
                                                        boost::math::tools::eps_tolerance<double>(50), iters);
    return 0.5 * (root.first + root.second);
  }

  // Smoothed penalty offset |x| at which pen' equals t in [0, 1), given 1 - t.
  static double penalty_offset(double t, double one_minus_t, double eps) {
    if (eps == 0.0 || t <= 0.0) return 0.0;
    return eps * t / std::sqrt(one_minus_t * (1.0 + t));
  }

  Iterate build(double u0, const std::vector<double>& slopes) const {
    Iterate it;
    it.u0 = u0;
    it.rise.resize(h_.size());
    for (std::size_t i = 0; i < h_.size(); ++i) it.rise[i] = sign_ * h_[i] * slopes[i];
    return it;
  }

  // Anchored at the outer node instead: the root of the flux equation is only
  // as accurate as its summed residual, and the inner node, whose penalty is
  // the flatter one at the common flux, absorbs that error best.
  Iterate build_from_outer(double u_outer, const std::vector<double>& slopes) const {
    Iterate it = build(0.0, slopes);
    CompensatedSum s;
    s.add(u_outer);
    for (double d : it.rise) s.add(-d);
    it.u0 = s.value();
    return it;
  }

 public:
  /// Point satisfying the discrete stationarity conditions: every cell carries
  /// the same flux, and the node balances at rho1 and rho2 fix the boundary
  /// values. It reduces to one monotone scalar equation for the flux.
  Iterate stationary_point(double eps) const {
    const double gap = std::abs(m2_ - m1_);
    const std::size_t n = h_.size();
    std::vector<double> slopes(n, 0.0);
    if (gap == 0.0) return build(m1_, slopes);

    if (dirichlet_ && quad_delta_ > 0.0) {
      auto rise = [&](double flux) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += h_[i] * (slopes[i] = quadratic_slope(i, flux));
        return sum - gap;
      };
      double hi = c_inner_ > 0.0 ? c_inner_ : 1.0;
      while (rise(hi) < 0.0 && hi < 1e300) hi *= 4.0;
      std::uintmax_t iters = 200;
      const auto root = boost::math::tools::toms748_solve(rise, 0.0, hi, -gap, rise(hi),
                                                          boost::math::tools::eps_tolerance<double>(50), iters);
      rise(0.5 * (root.first + root.second));
      return build(m1_, slopes);
    }

    // flux = lmax - slack; without quadratic term the flux stays below the
    // saturation of the innermost cell (Dirichlet) or of the inner penalty
    const double ref = dirichlet_ ? 0.5 * h_.front() : 0.0;
    const double lmax = ginf_ * kTwoPi * (r_.front() + ref);
    auto residual = [&](double slack, bool with_penalties) {
      CompensatedSum sum;
      sum.add(-gap);
      for (std::size_t i = 0; i < n; ++i) sum.add(h_[i] * (slopes[i] = saturating_slope(i, slack, ref)));
      if (with_penalties && !dirichlet_) {
        const double flux = lmax - slack;
        const double t2 = flux / c_outer_;
        sum.add(penalty_offset(flux / c_inner_, slack / c_inner_, eps));
        sum.add(penalty_offset(t2, 1.0 - t2, eps));
      }
      return sum.value();
    };

    double lo = lmax;
    while (lo > 1e-300 && !(residual(lo, true) > 0.0)) lo *= 0.0625;
    if (!(residual(lo, true) > 0.0)) {
      // the flux saturates: the remainder becomes the inner jump (relaxed) or
      // is absorbed by the innermost cell (pinned ends)
      const double missing = -residual(0.0, false);
      if (dirichlet_) {
        slopes.front() = 0.0;
        double sum = 0.0;
        for (std::size_t i = 1; i < n; ++i) sum += h_[i] * slopes[i];
        slopes.front() = std::max(0.0, gap - sum) / h_.front();
        return build(m1_, slopes);
      }
      return build(m1_ + sign_ * missing, slopes);
    }
    auto f = [&](double w) { return residual(std::exp(w), true); };
    const double wa = std::log(lo);
    const double wb = std::log(lmax);
    std::uintmax_t iters = 200;
    const auto root = boost::math::tools::toms748_solve(f, wa, wb, f(wa), f(wb),
                                                        boost::math::tools::eps_tolerance<double>(52), iters);
    const double slack = std::exp(0.5 * (root.first + root.second));
    residual(slack, true);
    if (dirichlet_) return build(m1_, slopes);
    const double t2 = (lmax - slack) / c_outer_;
    return build_from_outer(m2_ - sign_ * penalty_offset(t2, 1.0 - t2, eps), slopes);
  }
};

Iterate axpy(const Iterate& x, double a, const Iterate& p) {
  Iterate y = x;
  y.u0 += a * p.u0;
  for (std::size_t i = 0; i < y.rise.size(); ++i) y.rise[i] += a * p.rise[i];
  return y;
}

std::vector<double> smoothing_stages(double target) {
  // a zero target still needs a smooth objective for Newton
  if (!(target > 0.0)) target = 1e-12;
  std::vector<double> stages;
  for (double e = 1e-2; e > target * 1.5; e *= 0.1) stages.push_back(e);
  stages.push_back(target);
  return stages;
}

}  // namespace

std::string to_string(OracleMode mode) {
  switch (mode) {
    case OracleMode::Relaxed: return "relaxed";
    case OracleMode::QuadraticReg: return "quadratic-reg";
    case OracleMode::DensityReg: return "density-reg";
  }
  return "unknown";
}

void OracleConfig::validate() const {
  if (cells < 1) throw_invalid("oracle needs at least one cell");
  if (!(penalty_smoothing >= 0.0)) throw_invalid("penalty smoothing must be >= 0");
  if (!(tol > 0.0)) throw_invalid("oracle tolerance must be positive");
  if (max_iters < 1) throw_invalid("oracle max_iters must be positive");
  if (!(grading >= 1.0)) throw_invalid("oracle grid grading must be >= 1");
  if (mode == OracleMode::QuadraticReg && !(delta >= 0.0)) throw_invalid("quadratic regularization needs delta >= 0");
  if (mode == OracleMode::DensityReg && !(delta >= 0.0 && delta < 1.0))
    throw_invalid("density regularization needs delta in [0, 1)");
}

void DiscreteRadialFunction::validate() const {
  if (nodes.size() < 2 || nodes.size() != values.size()) throw_invalid("discrete function: node/value size mismatch");
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
    if (!(nodes[i] < nodes[i + 1])) throw_invalid("discrete function: nodes must be strictly increasing");
  for (double v : values)
    if (!std::isfinite(v)) throw_invalid("discrete function: values must be finite");
}

std::vector<double> oracle_nodes(const RadialProblem& p, const OracleConfig& cfg) {
  return graded_nodes(p.rho1, p.rho2, cfg.cells, cfg.grading);
}

double discrete_energy(const RadialProblem& p, const DiscreteRadialFunction& f, const OracleConfig& cfg) {
  p.validate();
  cfg.validate();
  f.validate();
  const auto nodes = oracle_nodes(p, cfg);
  if (f.nodes.size() != nodes.size()) throw_invalid("discrete function does not live on the oracle grid");
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (std::abs(f.nodes[i] - nodes[i]) > 1e-14 * nodes.back()) throw_invalid("discrete function grid mismatch");
  const Objective obj(p, cfg, nodes);
  return obj.nodal_value(f.values, cfg.penalty_smoothing);
}

OracleResult minimize(const RadialProblem& p, const OracleConfig& cfg, std::optional<std::span<const double>> initial) {
  p.validate();
  cfg.validate();
  const Objective obj(p, cfg, oracle_nodes(p, cfg));
  const auto& r = obj.nodes();
  const std::size_t n = r.size();

  std::vector<double> start(n);
  if (initial) {
    if (initial->size() != n) throw_invalid("initial iterate has the wrong number of nodes");
    std::copy(initial->begin(), initial->end(), start.begin());
  } else {
    for (std::size_t i = 0; i < n; ++i)
      start[i] = p.m1 + (p.m2 - p.m1) * (r[i] - r.front()) / (r.back() - r.front());
  }
  if (obj.dirichlet()) {
    start.front() = p.m1;
    start.back() = p.m2;
  }
  auto stages = obj.dirichlet() ? std::vector<double>{0.0} : smoothing_stages(cfg.penalty_smoothing);
  Iterate x = Iterate::from_nodal(start);
  if (!initial) {
    x = obj.stationary_point(stages.back());
    stages.erase(stages.begin(), stages.end() - 1);
  }

  OracleResult out;
  out.energy_history.push_back(obj.value(x, 0.0));
  // a stalled Newton iteration gets one boundary polish; it counts as a step
  // only if it lowers the residual
  auto polished = [&](Iterate& it, double eps, double gnorm) {
    Iterate trial = it;
    obj.polish_ends(trial, eps);
    if (!(obj.nodal_gradient_norm(trial, eps) < gnorm)) return false;
    it = std::move(trial);
    ++out.iterations;
    out.energy_history.push_back(obj.value(it, 0.0));
    return true;
  };
  Iterate step;
  for (double eps : stages) {
    for (std::size_t it = 0; it < cfg.max_iters; ++it) {
      const double e0 = obj.value(x, eps);
      const double gnorm = obj.nodal_gradient_norm(x, eps);
      if (gnorm <= cfg.tol * (1.0 + std::abs(e0))) break;

      // near-flat cells make the Newton sums cancel; damping restores a
      // descent direction
      double slope = obj.newton_step(x, eps, step);
      for (double damping = 1e-12; !(slope < 0.0) && damping < 1.0; damping *= 100.0)
        slope = obj.newton_step(x, eps, step, damping);
      if (!(slope < 0.0)) {
        if (polished(x, eps, gnorm)) continue;
        break;
      }
      // first the flux-linearized curve with an Armijo test, which takes the
      // large slope changes of saturating cells in few steps
      Iterate trial;
      bool accepted = false;
      {
        std::vector<double> flux, curv;
        obj.fluxes(x, flux);
        obj.curvatures(x, curv);
        for (double a = 1.0; a > 1e-6 && !accepted; a *= 0.5) {
          trial = obj.flux_path(x, step, a, flux, curv, eps);
          const double e = obj.value(trial, eps);
          accepted = e < e0 + 1e-4 * a * slope && e < e0 - 1e-13 * (1.0 + std::abs(e0));
        }
      }
      if (!accepted) {
        // then an exact search along the Newton ray on the directional
        // derivative, which stays accurate after energy differences have
        // sunk below round-off
        auto dphi = [&](double a) { return obj.directional(axpy(x, a, step), eps, step); };
        double alpha = 1.0;
        if (dphi(1.0) > 0.0) {
          double hi = 1.0;
          double lo = 0.5;
          for (int k = 0; k < 200 && dphi(lo) > 0.0; ++k) {
            hi = lo;
            lo *= 0.5;
          }
          for (int ls = 0; ls < 60; ++ls) {
            const double mid = 0.5 * (lo + hi);
            if (!(mid > lo && mid < hi)) break;
            (dphi(mid) > 0.0 ? hi : lo) = mid;
          }
          alpha = lo;
        }
        trial = axpy(x, alpha, step);
        if (!(obj.nodal_gradient_norm(trial, eps) < gnorm) && !(obj.value(trial, eps) < e0)) {
          if (polished(x, eps, gnorm)) continue;
          break;
        }
      }
      x = std::move(trial);
      ++out.iterations;
      out.energy_history.push_back(obj.value(x, 0.0));
    }
  }

  const double eps = stages.back();
  out.gradient_norm = obj.nodal_gradient_norm(x, eps);
  out.converged = out.gradient_norm <= cfg.tol * (1.0 + std::abs(obj.value(x, eps)));
  out.f.nodes = r;
  out.f.values = x.nodal();
  if (obj.dirichlet()) {
    out.f.values.front() = p.m1;
    out.f.values.back() = p.m2;
  }
  out.energy = obj.value(x, 0.0);
  return out;
}

double weighted_l1(std::span<const double> nodes, std::span<const double> a, std::span<const double> b) {
  if (nodes.size() != a.size() || nodes.size() != b.size()) throw_invalid("weighted_l1: size mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double h = nodes[i + 1] - nodes[i];
    sum += 0.5 * h * (std::abs(a[i] - b[i]) * nodes[i] + std::abs(a[i + 1] - b[i + 1]) * nodes[i + 1]);
  }
  return kTwoPi * sum;
}

std::vector<RegularizationEntry> regularization_study(const RadialProblem& p, std::span<const double> deltas,
                                                      const OracleConfig& cfg) {
  p.validate();
  cfg.validate();
  if (cfg.mode == OracleMode::Relaxed) throw_invalid("regularization study needs a regularized oracle mode");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] >= 0.0)) throw_invalid("regularization deltas must be >= 0");
    if (i > 0 && !(deltas[i] < deltas[i - 1])) throw_invalid("regularization deltas must be decreasing");
  }

  SolverOptions sopt;
  sopt.grid_nodes = cfg.cells + 1;
  sopt.grading = cfg.grading;
  const RadialSolution limit = solve(p, sopt);
  std::vector<double> u_limit(limit.profile.size());
  for (std::size_t i = 0; i < u_limit.size(); ++i) u_limit[i] = limit.profile[i].u;

  std::vector<RegularizationEntry> out;
  out.reserve(deltas.size());
  for (double delta : deltas) {
    RegularizationEntry entry;
    entry.delta = delta;
    try {
      OracleConfig c = cfg;
      c.delta = delta;
      const OracleResult res = minimize(p, c);
      if (!res.converged) throw Error(ErrorCode::NotConverged, "oracle did not converge");
      entry.l1_distance = weighted_l1(res.f.nodes, res.f.values, u_limit);
      entry.energy = res.energy;
      entry.ok = true;
    } catch (const std::exception& ex) {
      entry.error = ex.what();
    }
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace radial_bv
