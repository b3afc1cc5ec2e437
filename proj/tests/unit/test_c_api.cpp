#include "radial_bv/radial_bv.h"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

namespace {

double psi_phi3(double t, void* scale) { return *static_cast<double*>(scale) * std::pow(1.0 + t, -3.0); }

}  // namespace

TEST_CASE("status strings and version") {
  CHECK(std::string(rbv_version()).size() > 0);
  CHECK(std::string(rbv_status_string(RBV_OK)) == "ok");
  CHECK(std::string(rbv_status_string(RBV_ERR_INVALID_ARGUMENT)).size() > 0);
}

TEST_CASE("density handles") {
  rbv_density* d = nullptr;
  REQUIRE(rbv_density_phi_mu(3.0, &d) == RBV_OK);
  double v = 0.0;
  CHECK(rbv_density_g_prime(d, 1.0, &v) == RBV_OK);
  CHECK(v == doctest::Approx(0.75));
  double inf = 0.0;
  int est = 1;
  CHECK(rbv_density_g_prime_inf(d, &inf, &est) == RBV_OK);
  CHECK(inf == 1.0);
  CHECK(est == 0);
  rbv_density_family fam;
  CHECK(rbv_density_family_of(d, &fam) == RBV_OK);
  CHECK(fam == RBV_DENSITY_PHI_MU);

  CHECK(rbv_density_g(d, -1.0, &v) == RBV_ERR_DOMAIN);
  CHECK(std::string(rbv_last_error()).find(">= 0") != std::string::npos);
  CHECK(rbv_density_g(nullptr, 1.0, &v) == RBV_ERR_NULL_POINTER);
  CHECK(rbv_density_g(d, 1.0, nullptr) == RBV_ERR_NULL_POINTER);

  std::size_t len = 0;
  CHECK(rbv_density_describe(d, nullptr, 0, &len) == RBV_OK);
  std::vector<char> buf(len + 1);
  CHECK(rbv_density_describe(d, buf.data(), buf.size(), &len) == RBV_OK);
  CHECK(std::strlen(buf.data()) == len);

  double lo = 0.0, hi = 0.0;
  CHECK(rbv_regularization_window(d, &lo, &hi) == RBV_OK);
  CHECK(lo == 2.0);
  CHECK(hi == 3.0);
  rbv_density* r = nullptr;
  CHECK(rbv_density_regularized(d, 0.1, NAN, &r) == RBV_OK);
  CHECK(rbv_density_family_of(r, &fam) == RBV_OK);
  CHECK(fam == RBV_DENSITY_REGULARIZED);
  rbv_density* bad = nullptr;
  CHECK(rbv_density_regularized(d, 0.1, 1.9, &bad) == RBV_ERR_DOMAIN);
  CHECK(bad == nullptr);
  rbv_density_free(r);
  rbv_density_free(d);
  rbv_density_free(nullptr);

  CHECK(rbv_density_phi_mu(0.5, &d) == RBV_ERR_INVALID_ARGUMENT);
}

TEST_CASE("custom psi through a callback") {
  double scale = 2.0;
  rbv_density* d = nullptr;
  REQUIRE(rbv_density_custom_psi(psi_phi3, &scale, 3.0, 3.0, &d) == RBV_OK);
  double v = 0.0;
  int est = 0;
  CHECK(rbv_density_g_prime_inf(d, &v, &est) == RBV_OK);
  CHECK(est == 1);
  CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
  rbv_density_check chk{};
  CHECK(rbv_density_self_check(d, 100, 3, 1, &chk) == RBV_OK);
  CHECK(chk.pass == 1);
  rbv_density_free(d);
}

TEST_CASE("solve through the C API") {
  rbv_density* d = nullptr;
  REQUIRE(rbv_density_phi_mu(3.0, &d) == RBV_OK);
  const rbv_problem p{1.0, 2.0, 0.0, 2.0};
  rbv_solution* s = nullptr;
  REQUIRE(rbv_solve(d, &p, nullptr, &s) == RBV_OK);
  rbv_solution_summary sum{};
  CHECK(rbv_solution_get_summary(s, &sum) == RBV_OK);
  CHECK(sum.attained_inner == 0);
  CHECK(sum.lambda == 1.0);
  CHECK(sum.delta_m_infinite == 0);
  CHECK(sum.nodes == rbv_solver_options_default().grid_nodes);
  double r = 0, u = 0, du = 0, flux = 0;
  int capped = 0;
  CHECK(rbv_solution_node(s, sum.nodes - 1, &r, &u, &du, &flux, &capped) == RBV_OK);
  CHECK(r == 2.0);
  CHECK(u == 2.0);
  CHECK(flux == doctest::Approx(1.0));
  CHECK(rbv_solution_node(s, sum.nodes, &r, nullptr, nullptr, nullptr, nullptr) == RBV_ERR_OUT_OF_RANGE);
  CHECK(rbv_solution_profile_at(s, 1.5, &u, &du) == RBV_OK);
  CHECK(rbv_solution_profile_at(s, 2.5, &u, &du) != RBV_OK);
  rbv_solution_free(s);

  const rbv_problem bad{2.0, 1.0, 0.0, 1.0};
  s = nullptr;
  CHECK(rbv_solve(d, &bad, nullptr, &s) == RBV_ERR_INVALID_ARGUMENT);
  CHECK(s == nullptr);

  double dm = 0.0;
  int infinite = 1;
  CHECK(rbv_delta_m_infinity(d, &p, nullptr, &dm, &infinite) == RBV_OK);
  CHECK(infinite == 0);
  rbv_boundary_behavior bb{};
  CHECK(rbv_classify_boundary_behavior(d, &p, nullptr, &bb) == RBV_OK);
  CHECK(bb.attained == 0);
  rbv_density_free(d);

  REQUIRE(rbv_density_phi_mu(2.0, &d) == RBV_OK);
  CHECK(rbv_delta_m_infinity(d, &p, nullptr, &dm, &infinite) == RBV_OK);
  CHECK(infinite == 1);
  CHECK(std::isinf(dm));
  double cf = 0.0;
  CHECK(rbv_closed_form_profile(RBV_CLOSED_FORM_TWO, 0.5, 1.0, 2.0, &cf) == RBV_OK);
  CHECK(cf == doctest::Approx(0.5 * std::log(0.5 / 1.5)));
  rbv_density_free(d);
}

TEST_CASE("oracle through the C API") {
  rbv_density* d = nullptr;
  REQUIRE(rbv_density_phi_mu(2.0, &d) == RBV_OK);
  const rbv_problem p{1.0, 2.0, 0.0, 0.5};
  rbv_oracle_config cfg = rbv_oracle_config_default();
  CHECK(cfg.cells == 2048);
  cfg.cells = 256;
  rbv_oracle_result* res = nullptr;
  REQUIRE(rbv_oracle_minimize(d, &p, &cfg, nullptr, 0, &res) == RBV_OK);
  rbv_oracle_summary sum{};
  CHECK(rbv_oracle_result_get_summary(res, &sum) == RBV_OK);
  CHECK(sum.converged == 1);
  CHECK(sum.nodes == 257);
  double radius = 0, value = 0;
  CHECK(rbv_oracle_result_node(res, 256, &radius, &value) == RBV_OK);
  CHECK(radius == 2.0);
  rbv_oracle_result_free(res);

  std::vector<double> wrong(3, 0.0);
  res = nullptr;
  CHECK(rbv_oracle_minimize(d, &p, &cfg, wrong.data(), wrong.size(), &res) == RBV_ERR_INVALID_ARGUMENT);

  rbv_agreement ag{};
  const rbv_agreement_thresholds th = rbv_agreement_thresholds_default();
  CHECK(rbv_oracle_agreement(d, &p, &cfg, &th, &ag) == RBV_OK);
  CHECK(ag.pass == 1);
  rbv_density_free(d);
}

TEST_CASE("sweep and trace study through the C API") {
  rbv_sweep_config sc = rbv_sweep_config_default();
  sc.count = 8;
  sc.threads = 2;
  rbv_sweep* sw = nullptr;
  REQUIRE(rbv_sweep_run(&sc, &sw) == RBV_OK);
  rbv_sweep_summary ss{};
  CHECK(rbv_sweep_get_summary(sw, &ss) == RBV_OK);
  CHECK(ss.count == 8);
  CHECK(ss.pass == 1);
  rbv_sweep_point pt{};
  CHECK(rbv_sweep_point_at(sw, 0, &pt) == RBV_OK);
  CHECK(pt.ok == 1);
  const char* msg = nullptr;
  CHECK(rbv_sweep_point_error(sw, 0, &msg) == RBV_OK);
  CHECK(std::string(msg).empty());
  CHECK(rbv_sweep_point_at(sw, 8, &pt) == RBV_ERR_OUT_OF_RANGE);
  rbv_sweep_free(sw);

  rbv_density* d = nullptr;
  REQUIRE(rbv_density_phi_mu(3.0, &d) == RBV_OK);
  const double zetas[] = {-2.0, -1.0, 0.0, 0.5};
  rbv_trace_study* st = nullptr;
  REQUIRE(rbv_trace_study_run(d, 1.0, 2.0, 1.0, zetas, 4, nullptr, 1, &st) == RBV_OK);
  rbv_trace_study_summary ts{};
  CHECK(rbv_trace_study_get_summary(st, &ts) == RBV_OK);
  CHECK(ts.count == 4);
  CHECK(ts.pass == 1);
  CHECK(ts.has_saturation_level == 1);
  rbv_trace_study_free(st);
  rbv_density_free(d);
}
