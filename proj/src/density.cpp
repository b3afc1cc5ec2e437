#include "radial_bv/density.hpp"

#include "density_model.hpp"
#include "radial_bv/error.hpp"
#include "radial_bv/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <vector>

namespace radial_bv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt_param(const char* name, double v) {
  std::ostringstream os;
  os.precision(17);
  os << name << '=' << v;
  return os.str();
}

// log(1 + t^k) without overflow for large t.
double log1p_pow(double t, double k) {
  if (t <= 1.0) return std::log1p(std::pow(t, k));
  return k * std::log(t) + std::log1p(std::pow(t, -k));
}

}  // namespace

// ---------------------------------------------------------------------------
// Phi_mu

double phi(double mu, double t) {
  if (t < 0.05) {
    // (mu-1) * sum_n binom(-mu, n) t^(n+2) / ((n+1)(n+2))
    double c = 1.0;
    double tp = t * t;
    double sum = 0.0;
    for (int n = 0; n < 400; ++n) {
      const double term = c * tp / ((n + 1.0) * (n + 2.0));
      sum += term;
      if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
      c *= (-mu - n) / (n + 1.0);
      tp *= t;
    }
    return (mu - 1.0) * sum;
  }
  const double a = 2.0 - mu;
  const double l = std::log1p(t);
  const double growth = a == 0.0 ? l : std::expm1(a * l) / a;
  return t - growth;
}

double phi_prime(double mu, double t) { return -std::expm1((1.0 - mu) * std::log1p(t)); }

double phi_second(double mu, double t) { return (mu - 1.0) * std::exp(-mu * std::log1p(t)); }

double phi_deficit(double mu, double t) { return std::exp((1.0 - mu) * std::log1p(t)); }

// ---------------------------------------------------------------------------
// generic inversion

namespace detail {

double DensityModel::shape_parameter() const { return kNaN; }

namespace {

// Root of log(h(e^x)) = log(target) for a monotone positive h, bracketed in
// log t. Increasing selects the direction of h.
double solve_log_monotone(const std::function<double(double)>& h, double target, bool increasing) {
  auto residual = [&](double x) {
    const double v = h(std::exp(x));
    if (v <= 0.0) return increasing ? -kInf : kInf;
    return std::log(v) - std::log(target);
  };
  // residual is increasing in x when h is increasing
  auto below = [&](double x) { return increasing ? residual(x) < 0.0 : residual(x) > 0.0; };
  double lo = 0.0;
  double hi = 0.0;
  if (below(0.0)) {
    hi = 1.0;
    while (below(hi)) {
      lo = hi;
      hi *= 2.0;
      if (hi > 709.0) return kInf;
    }
  } else {
    lo = -1.0;
    while (!below(lo)) {
      hi = lo;
      lo *= 2.0;
      if (lo < -745.0) return 0.0;
    }
  }
  std::uintmax_t iters = 300;
  auto tol = [](double a, double b) { return std::abs(a - b) <= 1e-15; };
  auto f = [&](double x) { return increasing ? residual(x) : -residual(x); };
  const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
  return std::exp(0.5 * (a + b));
}

}  // namespace

double DensityModel::inv_g_prime(double s) const {
  if (s == 0.0) return 0.0;
  const double ginf = g_prime_inf();
  if (s > 0.5 * ginf) return inv_deficit(ginf - s);
  return solve_log_monotone([this](double t) { return g_prime(t); }, s, true);
}

double DensityModel::inv_deficit(double gap) const {
  if (gap <= 0.0) return kInf;
  const double ginf = g_prime_inf();
  if (gap >= ginf) return 0.0;
  if (gap > 0.5 * ginf) return inv_g_prime(ginf - gap);
  return solve_log_monotone([this](double t) { return deficit(t); }, gap, false);
}

// ---------------------------------------------------------------------------
// families

namespace {

class PhiMuModel final : public DensityModel {
 public:
  explicit PhiMuModel(double mu) : mu_(mu) {}
  DensityFamily family() const override { return DensityFamily::PhiMu; }
  double g(double t) const override { return phi(mu_, t); }
  double g_prime(double t) const override { return phi_prime(mu_, t); }
  double g_second(double t) const override { return phi_second(mu_, t); }
  double deficit(double t) const override { return phi_deficit(mu_, t); }
  double g_prime_inf() const override { return 1.0; }
  double mu() const override { return mu_; }
  double mu_bar() const override { return mu_; }
  double shape_parameter() const override { return mu_; }
  std::string describe() const override { return "phi-mu(" + fmt_param("mu", mu_) + ")"; }

  // (1 - s)^(-1/(mu-1)) - 1
  double inv_g_prime(double s) const override { return std::expm1(-std::log1p(-s) / (mu_ - 1.0)); }
  double inv_deficit(double gap) const override {
    if (gap <= 0.0) return kInf;
    return std::expm1(-std::log(gap) / (mu_ - 1.0));
  }

 private:
  double mu_;
};

class GTildeKModel final : public DensityModel {
 public:
  explicit GTildeKModel(double k) : k_(k) {}
  DensityFamily family() const override { return DensityFamily::GTildeK; }
  double g(double t) const override { return std::expm1(log1p_pow(t, k_) / k_); }
  double g_prime(double t) const override {
    if (t == 0.0) return 0.0;
    return std::exp(-exponent() * std::log1p(std::pow(t, -k_)));
  }
  double g_second(double t) const override {
    if (t == 0.0) return k_ == 2.0 ? 1.0 : (k_ > 2.0 ? 0.0 : kInf);
    return (k_ - 1.0) * std::exp((k_ - 2.0) * std::log(t) + (1.0 / k_ - 2.0) * log1p_pow(t, k_));
  }
  double deficit(double t) const override {
    if (t == 0.0) return 1.0;
    return -std::expm1(-exponent() * std::log1p(std::pow(t, -k_)));
  }
  double g_prime_inf() const override { return 1.0; }
  double mu() const override { return k_ + 1.0; }
  double mu_bar() const override { return k_ + 1.0; }
  double shape_parameter() const override { return k_; }
  std::string describe() const override { return "g-tilde-k(" + fmt_param("k", k_) + ")"; }

  // g' = y^((k-1)/k) with y = t^k / (1 + t^k)
  double inv_g_prime(double s) const override {
    if (s == 0.0) return 0.0;
    const double log_y = std::log(s) / exponent();
    return from_log_y(log_y);
  }
  double inv_deficit(double gap) const override {
    if (gap <= 0.0) return kInf;
    if (gap >= 1.0) return 0.0;
    return from_log_y(std::log1p(-gap) / exponent());
  }

 private:
  double exponent() const { return (k_ - 1.0) / k_; }
  double from_log_y(double log_y) const {
    const double log_one_minus_y = std::log(-std::expm1(log_y));
    return std::exp((log_y - log_one_minus_y) / k_);
  }
  double k_;
};

class MinimalSurfaceModel final : public DensityModel {
 public:
  DensityFamily family() const override { return DensityFamily::MinimalSurface; }
  double g(double t) const override { return t / (std::hypot(1.0, t) + 1.0) * t; }
  double g_prime(double t) const override { return t / std::hypot(1.0, t); }
  double g_second(double t) const override { return std::pow(std::hypot(1.0, t), -3.0); }
  double deficit(double t) const override {
    const double h = std::hypot(1.0, t);
    return 1.0 / h / (h + t);
  }
  double g_prime_inf() const override { return 1.0; }
  double mu() const override { return 3.0; }
  double mu_bar() const override { return 3.0; }
  std::string describe() const override { return "minimal-surface"; }

  double inv_g_prime(double s) const override { return s / std::sqrt((1.0 - s) * (1.0 + s)); }
  double inv_deficit(double gap) const override {
    if (gap <= 0.0) return kInf;
    return (1.0 - gap) / std::sqrt(gap * (2.0 - gap));
  }
};

// g' and g are cumulative integrals of psi over a fixed geometric panel set
// [0, 2^-20], [2^-20, 2^-19.75], ..., up to 2^80. Full panels are integrated
// once at construction; a query adds one fixed-order Gauss rule on the
// partial panel, so evaluation is read-only and smooth in t.
class CustomPsiModel final : public DensityModel {
 public:
  CustomPsiModel(PsiFunction psi, double mu, double mu_bar) : psi_(std::move(psi)), mu_(mu), mu_bar_(mu_bar) {
    constexpr int kPerOctave = 4;
    constexpr int kLowOctave = -20;
    constexpr int kHighOctave = 80;
    edges_.push_back(0.0);
    for (int j = 0; j <= (kHighOctave - kLowOctave) * kPerOctave; ++j)
      edges_.push_back(std::exp2(kLowOctave + static_cast<double>(j) / kPerOctave));

    for (double e : edges_) {
      const double v = psi_(e);
      if (!(v > 0.0) || !std::isfinite(v))
        throw_invalid("custom psi must be finite and positive; psi(" + show(e) + ") = " +
                      show(v));
    }

    const std::size_t panels = edges_.size() - 1;
    std::vector<double> mass(panels);
    prefix_.assign(edges_.size(), 0.0);
    g_at_.assign(edges_.size(), 0.0);
    for (std::size_t j = 0; j < panels; ++j) {
      const double a = edges_[j];
      const double b = edges_[j + 1];
      mass[j] = quad::integrate(psi_, a, b, 1e-14).value;
      const double moment = quad::integrate([&](double r) { return (b - r) * psi_(r); }, a, b, 1e-14).value;
      prefix_[j + 1] = prefix_[j] + mass[j];
      g_at_[j + 1] = g_at_[j] + (b - a) * prefix_[j] + moment;
    }
    suffix_.assign(edges_.size(), 0.0);
    for (std::size_t j = panels; j-- > 0;) suffix_[j] = suffix_[j + 1] + mass[j];

    const double q = mass[panels - 1] / mass[panels - 2];
    if (!(q < 0.999) || !(q > 0.0))
      throw_invalid("custom psi is not integrable: g' has no finite recession slope");
    tail_ = mass[panels - 1] * q / (1.0 - q);
    tail_decay_ = -kPerOctave * std::log2(q);
    ginf_ = prefix_.back() + tail_;
  }

  DensityFamily family() const override { return DensityFamily::CustomPsi; }

  double g(double t) const override {
    const double top = edges_.back();
    if (t >= top) {
      const double x = t / top;
      const double a = tail_decay_;
      const double lost = a == 1.0 ? tail_ * top * std::log(x) : tail_ * top * (std::pow(x, 1.0 - a) - 1.0) / (1.0 - a);
      return g_at_.back() + ginf_ * (t - top) - lost;
    }
    const std::size_t j = panel_of(t);
    const double a = edges_[j];
    const double partial = Rule::integrate([&](double r) { return (t - r) * psi_(r); }, a, t);
    return g_at_[j] + (t - a) * prefix_[j] + partial;
  }

  double g_prime(double t) const override {
    if (t >= edges_.back()) return ginf_ - deficit(t);
    const std::size_t j = panel_of(t);
    return prefix_[j] + Rule::integrate(psi_, edges_[j], t);
  }

  double g_second(double t) const override { return psi_(t); }

  double deficit(double t) const override {
    const double top = edges_.back();
    if (t >= top) return tail_ * std::pow(t / top, -tail_decay_);
    const std::size_t j = panel_of(t);
    return Rule::integrate(psi_, t, edges_[j + 1]) + suffix_[j + 1] + tail_;
  }

  double inv_g_prime(double s) const override {
    if (s == 0.0) return 0.0;
    if (s > 0.5 * ginf_ || s >= prefix_.back()) return inv_deficit(ginf_ - s);
    const auto it = std::upper_bound(prefix_.begin(), prefix_.end(), s);
    const std::size_t j = static_cast<std::size_t>(std::distance(prefix_.begin(), it)) - 1;
    return newton_in_panel([&](double t) { return g_prime(t) - s; }, [&](double t) { return psi_(t); }, j);
  }

  double inv_deficit(double gap) const override {
    if (gap <= 0.0) return kInf;
    if (gap >= ginf_) return 0.0;
    if (gap > 0.5 * ginf_) return inv_g_prime(ginf_ - gap);
    if (gap <= tail_) return edges_.back() * std::pow(gap / tail_, -1.0 / tail_decay_);
    // deficit at edge j is suffix_[j] + tail_, decreasing in j
    const auto it = std::upper_bound(suffix_.begin(), suffix_.end(), gap - tail_, std::greater<>());
    const std::size_t j = static_cast<std::size_t>(std::distance(suffix_.begin(), it)) - 1;
    return newton_in_panel([&](double t) { return gap - deficit(t); }, [&](double t) { return psi_(t); }, j);
  }

  double g_prime_inf() const override { return ginf_; }
  bool g_prime_inf_estimated() const override { return true; }
  double mu() const override { return mu_; }
  double mu_bar() const override { return mu_bar_; }
  std::string describe() const override {
    return "custom-psi(" + fmt_param("mu", mu_) + ", " + fmt_param("mu_bar", mu_bar_) + ")";
  }

 private:
  using Rule = boost::math::quadrature::gauss<double, 30>;

  // Root of the increasing f on panel j, whose derivative is df; Newton
  // steps that leave the bracket fall back to bisection.
  template <class F, class DF>
  double newton_in_panel(F&& f, DF&& df, std::size_t j) const {
    double lo = edges_[j];
    double hi = edges_[std::min(j + 1, edges_.size() - 1)];
    double t = 0.5 * (lo + hi);
    for (int it = 0; it < 100; ++it) {
      const double v = f(t);
      if (v == 0.0) return t;
      (v < 0.0 ? lo : hi) = t;
      double next = t - v / df(t);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - t) <= 1e-15 * next || !(lo < hi)) return next;
      t = next;
    }
    return t;
  }

  std::size_t panel_of(double t) const {
    const auto it = std::upper_bound(edges_.begin(), edges_.end(), t);
    return static_cast<std::size_t>(std::distance(edges_.begin(), it)) - 1;
  }

  PsiFunction psi_;
  double mu_;
  double mu_bar_;
  std::vector<double> edges_;
  std::vector<double> prefix_;
  std::vector<double> suffix_;
  std::vector<double> g_at_;
  double tail_ = 0.0;
  double tail_decay_ = 0.0;
  double ginf_ = 0.0;
};

class RegularizedModel final : public DensityModel {
 public:
  RegularizedModel(EnergyDensity base, double delta, double tau) : base_(std::move(base)), delta_(delta), tau_(tau) {}
  DensityFamily family() const override { return DensityFamily::Regularized; }
  double g(double t) const override { return delta_ * phi(tau_, t) + base_.g(t); }
  double g_prime(double t) const override { return delta_ * phi_prime(tau_, t) + base_.g_prime(t); }
  double g_second(double t) const override { return delta_ * phi_second(tau_, t) + base_.g_second(t); }
  double deficit(double t) const override { return delta_ * phi_deficit(tau_, t) + base_.g_prime_deficit(t); }
  double g_prime_inf() const override { return delta_ + base_.g_prime_inf(); }
  bool g_prime_inf_estimated() const override { return base_.g_prime_inf_estimated(); }
  double mu() const override { return tau_; }
  double mu_bar() const override { return tau_; }
  std::string describe() const override {
    return "regularized(" + base_.describe() + ", " + fmt_param("delta", delta_) + ", " + fmt_param("tau", tau_) + ")";
  }

  const EnergyDensity& base() const { return base_; }
  double delta() const { return delta_; }
  double tau() const { return tau_; }

 private:
  EnergyDensity base_;
  double delta_;
  double tau_;
};

void require_exponents(double mu, double mu_bar) {
  if (!(mu > 1.0) || !std::isfinite(mu)) throw_invalid("ellipticity exponent mu must be finite and > 1");
  if (!(mu_bar >= 1.0 && mu_bar <= mu)) throw_invalid("mu_bar must lie in [1, mu]");
  if (!(mu - mu_bar < 2.0)) throw_invalid("exponents violate mu - mu_bar < 2");
}

}  // namespace
}  // namespace detail

// ---------------------------------------------------------------------------
// EnergyDensity

std::string to_string(DensityFamily family) {
  switch (family) {
    case DensityFamily::PhiMu: return "phi-mu";
    case DensityFamily::GTildeK: return "g-tilde-k";
    case DensityFamily::MinimalSurface: return "minimal-surface";
    case DensityFamily::CustomPsi: return "custom";
    case DensityFamily::Regularized: return "regularized";
  }
  return "unknown";
}

EnergyDensity::EnergyDensity(std::shared_ptr<const detail::DensityModel> model) : model_(std::move(model)) {}

EnergyDensity EnergyDensity::phi_mu(double mu) {
  detail::require_exponents(mu, mu);
  return EnergyDensity(std::make_shared<detail::PhiMuModel>(mu));
}

EnergyDensity EnergyDensity::g_tilde_k(double k) {
  if (!(k > 1.0) || !std::isfinite(k)) throw_invalid("g-tilde-k requires finite k > 1");
  return EnergyDensity(std::make_shared<detail::GTildeKModel>(k));
}

EnergyDensity EnergyDensity::minimal_surface() {
  return EnergyDensity(std::make_shared<detail::MinimalSurfaceModel>());
}

EnergyDensity EnergyDensity::custom_psi(PsiFunction psi, double mu, double mu_bar) {
  if (!psi) throw_invalid("custom density needs a psi function");
  detail::require_exponents(mu, mu_bar);
  return EnergyDensity(std::make_shared<detail::CustomPsiModel>(std::move(psi), mu, mu_bar));
}

DensityFamily EnergyDensity::family() const { return model_->family(); }

namespace {
void require_nonneg(double t, const char* op) {
  if (!(t >= 0.0)) throw_domain(std::string(op) + ": argument must be >= 0, got " + show(t));
}
}  // namespace

double EnergyDensity::g(double t) const {
  require_nonneg(t, "g");
  return model_->g(t);
}

double EnergyDensity::g_prime(double t) const {
  require_nonneg(t, "g'");
  return model_->g_prime(t);
}

double EnergyDensity::g_second(double t) const {
  require_nonneg(t, "g''");
  return model_->g_second(t);
}

double EnergyDensity::g_prime_deficit(double t) const {
  require_nonneg(t, "g' deficit");
  return model_->deficit(t);
}

double EnergyDensity::inv_g_prime(double s) const {
  const double ginf = model_->g_prime_inf();
  if (!(s >= 0.0)) throw_domain("inverse of g': slope must be >= 0");
  if (!(s < ginf * (1.0 - 1e-14)))
    throw_domain("inverse of g': slope " + show(s) + " at or beyond the recession slope");
  return model_->inv_g_prime(s);
}

double EnergyDensity::inv_g_prime_deficit(double gap) const {
  const double ginf = model_->g_prime_inf();
  if (!(gap >= 0.0) || gap > ginf) throw_domain("inverse of g' deficit: gap must lie in [0, g'_inf]");
  if (gap == 0.0) return kInf;
  return model_->inv_deficit(gap);
}

double EnergyDensity::g_prime_inf() const { return model_->g_prime_inf(); }
bool EnergyDensity::g_prime_inf_estimated() const { return model_->g_prime_inf_estimated(); }
double EnergyDensity::mu() const { return model_->mu(); }
double EnergyDensity::mu_bar() const { return model_->mu_bar(); }
double EnergyDensity::shape_parameter() const { return model_->shape_parameter(); }
std::string EnergyDensity::describe() const { return model_->describe(); }

std::optional<EnergyDensity> EnergyDensity::base() const {
  if (const auto* reg = dynamic_cast<const detail::RegularizedModel*>(model_.get())) return reg->base();
  return std::nullopt;
}

double EnergyDensity::delta() const {
  if (const auto* reg = dynamic_cast<const detail::RegularizedModel*>(model_.get())) return reg->delta();
  return 0.0;
}

double EnergyDensity::tau() const {
  if (const auto* reg = dynamic_cast<const detail::RegularizedModel*>(model_.get())) return reg->tau();
  return kNaN;
}

TauWindow regularization_window(const EnergyDensity& base) {
  return {std::max(base.mu() - 1.0, 1.0), base.mu_bar()};
}

EnergyDensity make_regularized(const EnergyDensity& base, double delta, double tau) {
  if (!(delta > 0.0 && delta < 1.0)) throw_domain("regularization delta must lie in (0, 1)");
  const TauWindow w = regularization_window(base);
  if (!(tau > w.lower && tau < w.upper))
    throw_domain("regularization tau = " + show(tau) + " outside (" + show(w.lower) + ", " +
                 show(w.upper) + ")");
  return EnergyDensity(std::make_shared<detail::RegularizedModel>(base, delta, tau));
}

// ---------------------------------------------------------------------------
// ellipticity

EllipticityResult verify_ellipticity(const EnergyDensity& d, std::span<const double> t_grid) {
  return verify_ellipticity(d, t_grid, d.mu(), d.mu_bar());
}

EllipticityResult verify_ellipticity(const EnergyDensity& d, std::span<const double> t_grid, double mu,
                                     double mu_bar) {
  if (t_grid.empty()) throw_invalid("ellipticity grid must be nonempty");
  if (!std::is_sorted(t_grid.begin(), t_grid.end())) throw_invalid("ellipticity grid must be nondecreasing");
  if (t_grid.front() < 0.0) throw_domain("ellipticity grid must be nonnegative");

  EllipticityResult r;
  r.nu1 = kInf;
  r.nu2 = 0.0;
  for (double t : t_grid) {
    const double curv = d.g_second(t);
    const double l = std::log1p(t);
    const double lower = curv * std::exp(mu * l);
    const double upper = curv * std::exp(mu_bar * l);
    if (!(lower >= r.nu1)) r.nu1 = lower;  // NaN propagates as failure
    if (!(upper <= r.nu2)) r.nu2 = upper;
  }
  if (!(r.nu1 > 0.0) || !std::isfinite(r.nu1)) {
    r.failure = "lower bound constant nu1 = " + show(r.nu1) + " is not positive and finite";
    return r;
  }
  if (!(r.nu2 > 0.0) || !std::isfinite(r.nu2)) {
    r.failure = "upper bound constant nu2 = " + show(r.nu2) + " is not positive and finite";
    return r;
  }
  r.ok = true;
  return r;
}

}  // namespace radial_bv
