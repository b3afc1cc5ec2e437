#include "run_config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace cli {

using nlohmann::json;

namespace {

const std::set<std::string> kFamilies{"phi-mu", "g-tilde-k", "minimal-surface", "custom"};
const std::set<std::string> kFormats{"csv", "json", "svg"};

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

double number(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError("'" + key + "' must be a number");
  return j.get<double>();
}

std::size_t count(const json& j, const std::string& key) {
  if (!j.is_number_unsigned()) throw ConfigError("'" + key + "' must be a non-negative integer");
  return j.get<std::size_t>();
}

std::string text(const json& j, const std::string& key) {
  if (!j.is_string()) throw ConfigError("'" + key + "' must be a string");
  return j.get<std::string>();
}

template <class T, class F>
void read(const json& j, const char* key, T& target, F&& convert) {
  if (j.contains(key)) target = convert(j.at(key), key);
}

rbv_oracle_mode parse_mode(const std::string& s) {
  if (s == "relaxed") return RBV_ORACLE_RELAXED;
  if (s == "quadratic-reg") return RBV_ORACLE_QUADRATIC_REG;
  if (s == "density-reg") return RBV_ORACLE_DENSITY_REG;
  throw ConfigError("unknown oracle mode '" + s + "' (relaxed | quadratic-reg | density-reg)");
}

void apply_density(DensitySpec& d, const json& j) {
  if (j.is_string()) {
    d.family = j.get<std::string>();
    return;
  }
  check_keys(j, "density", {"family", "mu", "k", "mu_bar", "psi", "regularize"});
  read(j, "family", d.family, text);
  read(j, "mu", d.mu, number);
  read(j, "k", d.k, number);
  if (j.contains("mu_bar")) d.mu_bar = number(j.at("mu_bar"), "mu_bar");
  if (j.contains("psi")) {
    const json& terms = j.at("psi");
    if (!terms.is_array()) throw ConfigError("'psi' must be an array of [c, e] pairs");
    d.psi.clear();
    for (const json& t : terms) {
      if (!t.is_array() || t.size() != 2) throw ConfigError("every psi term must be a pair [c, e]");
      d.psi.push_back({number(t[0], "psi"), number(t[1], "psi")});
    }
  }
  if (j.contains("regularize")) {
    const json& r = j.at("regularize");
    check_keys(r, "density.regularize", {"delta", "tau"});
    if (!r.contains("delta")) throw ConfigError("density.regularize needs 'delta'");
    d.reg_delta = number(r.at("delta"), "delta");
    if (r.contains("tau")) d.reg_tau = number(r.at("tau"), "tau");
  }
}

void check_finite(double v, const std::string& name) {
  if (!std::isfinite(v)) throw ConfigError(name + " must be finite");
}

void validate(const RunConfig& c) {
  const DensitySpec& d = c.density;
  if (!kFamilies.count(d.family))
    throw ConfigError("unknown density '" + d.family + "' (phi-mu | g-tilde-k | minimal-surface | custom)");
  check_finite(d.mu, "mu");
  check_finite(d.k, "k");
  if (d.family == "custom") {
    if (d.psi.empty()) throw ConfigError("the custom density needs psi terms [c, e] in the config file");
    for (const PsiTerm& t : d.psi) {
      if (!(t.c > 0.0) || !std::isfinite(t.c) || !(t.e > 0.0) || !std::isfinite(t.e))
        throw ConfigError("psi terms need c > 0 and e > 0");
    }
  }
  const rbv_problem& p = c.problem;
  check_finite(p.rho1, "rho1");
  check_finite(p.rho2, "rho2");
  check_finite(p.m1, "m1");
  check_finite(p.m2, "m2");
  if (!(p.rho1 > 0.0)) throw ConfigError("rho1 must be positive");
  if (!(p.rho2 > p.rho1)) throw ConfigError("rho2 must exceed rho1");
  if (c.solver.grid_nodes < 2) throw ConfigError("the profile grid needs at least 2 nodes");
  if (!(c.solver.quad_tol > 0.0)) throw ConfigError("the quadrature tolerance must be positive");
  if (c.oracle.cells < 1) throw ConfigError("the oracle needs at least one cell");
  if (!(c.oracle.tol > 0.0)) throw ConfigError("the oracle tolerance must be positive");
  if (c.formats.empty()) throw ConfigError("no output format selected");
  if (c.out.empty()) throw ConfigError("the output directory must not be empty");
  if (c.reg_deltas.empty()) throw ConfigError("reg_study.deltas must not be empty");
}

std::size_t parse_threads_env(const char* value) {
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(value, &end, 10);
  if (errno != 0 || end == value || *end != '\0' || value[0] == '-')
    throw ConfigError(std::string("RADIAL_BV_THREADS must be a non-negative integer, got '") + value + "'");
  return static_cast<std::size_t>(v);
}

}  // namespace

bool RunConfig::wants(const std::string& format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

const char* mode_name(rbv_oracle_mode mode) {
  switch (mode) {
    case RBV_ORACLE_RELAXED: return "relaxed";
    case RBV_ORACLE_QUADRATIC_REG: return "quadratic-reg";
    case RBV_ORACLE_DENSITY_REG: return "density-reg";
  }
  return "unknown";
}

std::vector<std::string> parse_formats(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (!kFormats.count(item)) throw ConfigError("unknown output format '" + item + "' (csv | json | svg)");
    if (std::find(out.begin(), out.end(), item) == out.end()) out.push_back(item);
  }
  return out;
}

void apply_json(RunConfig& c, const json& j) {
  check_keys(j, "config",
             {"density", "mu", "k", "rho1", "rho2", "m1", "m2", "cells", "tol", "out", "format", "seed", "threads",
              "solver", "oracle", "thresholds", "sweep", "verify", "reg_study"});
  if (j.contains("density")) apply_density(c.density, j.at("density"));
  read(j, "mu", c.density.mu, number);
  read(j, "k", c.density.k, number);
  read(j, "rho1", c.problem.rho1, number);
  read(j, "rho2", c.problem.rho2, number);
  read(j, "m1", c.problem.m1, number);
  read(j, "m2", c.problem.m2, number);
  read(j, "out", c.out, text);
  if (j.contains("format")) {
    const json& f = j.at("format");
    if (f.is_string()) {
      c.formats = parse_formats(f.get<std::string>());
    } else if (f.is_array()) {
      std::string joined;
      for (const json& item : f) joined += text(item, "format") + ",";
      c.formats = parse_formats(joined);
    } else {
      throw ConfigError("'format' must be a string or an array of strings");
    }
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ConfigError("'seed' must be a non-negative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  read(j, "threads", c.threads, count);
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    check_keys(s, "solver", {"grid_nodes", "grading", "quad_tol", "slope_cap", "max_root_iters"});
    read(s, "grid_nodes", c.solver.grid_nodes, count);
    read(s, "grading", c.solver.grading, number);
    read(s, "quad_tol", c.solver.quad_tol, number);
    read(s, "slope_cap", c.solver.slope_cap, number);
    read(s, "max_root_iters", c.solver.max_root_iters, count);
  }
  if (j.contains("oracle")) {
    const json& o = j.at("oracle");
    check_keys(o, "oracle", {"cells", "penalty_smoothing", "tol", "max_iters", "grading"});
    read(o, "cells", c.oracle.cells, count);
    read(o, "penalty_smoothing", c.oracle.penalty_smoothing, number);
    read(o, "tol", c.oracle.tol, number);
    read(o, "max_iters", c.oracle.max_iters, count);
    read(o, "grading", c.oracle.grading, number);
  }
  if (j.contains("thresholds")) {
    const json& t = j.at("thresholds");
    check_keys(t, "thresholds", {"linf_attained", "linf_not_attained", "energy_gap"});
    read(t, "linf_attained", c.thresholds.linf_attained, number);
    read(t, "linf_not_attained", c.thresholds.linf_not_attained, number);
    read(t, "energy_gap", c.thresholds.energy_gap, number);
  }
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    check_keys(s, "sweep", {"count"});
    read(s, "count", c.sweep_count, count);
  }
  if (j.contains("verify")) {
    const json& v = j.at("verify");
    check_keys(v, "verify", {"sweep_count", "oracle_count", "oracle_cells", "density_samples"});
    read(v, "sweep_count", c.verify.sweep_count, count);
    read(v, "oracle_count", c.verify.oracle_count, count);
    read(v, "oracle_cells", c.verify.oracle_cells, count);
    read(v, "density_samples", c.verify.density_samples, count);
  }
  if (j.contains("reg_study")) {
    const json& r = j.at("reg_study");
    check_keys(r, "reg_study", {"deltas", "modes"});
    if (r.contains("deltas")) {
      if (!r.at("deltas").is_array()) throw ConfigError("reg_study.deltas must be an array");
      c.reg_deltas.clear();
      for (const json& d : r.at("deltas")) c.reg_deltas.push_back(number(d, "deltas"));
    }
    if (r.contains("modes")) {
      if (!r.at("modes").is_array()) throw ConfigError("reg_study.modes must be an array");
      c.reg_modes.clear();
      for (const json& m : r.at("modes")) {
        const rbv_oracle_mode mode = parse_mode(text(m, "modes"));
        if (mode == RBV_ORACLE_RELAXED) throw ConfigError("reg_study.modes takes quadratic-reg or density-reg");
        c.reg_modes.push_back(mode);
      }
    }
  }
  // the generic grid and tolerance keys are resolved per command
  if (j.contains("cells")) count(j.at("cells"), "cells");
  if (j.contains("tol")) number(j.at("tol"), "tol");
}

RunConfig build_config(const std::string& command, const FlagOverrides& flags) {
  RunConfig c;
  c.command = command;
  std::optional<std::size_t> cells;
  std::optional<double> tol;

  if (flags.config) {
    std::ifstream in(*flags.config);
    if (!in) throw ConfigError("cannot open config file '" + *flags.config + "'");
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("config file '" + *flags.config + "' is not valid JSON: " + e.what());
    }
    apply_json(c, j);
    if (j.contains("cells")) cells = j.at("cells").get<std::size_t>();
    if (j.contains("tol")) tol = j.at("tol").get<double>();
  }

  if (flags.density) c.density.family = *flags.density;
  if (flags.mu) c.density.mu = *flags.mu;
  if (flags.k) c.density.k = *flags.k;
  if (flags.rho1) c.problem.rho1 = *flags.rho1;
  if (flags.rho2) c.problem.rho2 = *flags.rho2;
  if (flags.m1) c.problem.m1 = *flags.m1;
  if (flags.m2) c.problem.m2 = *flags.m2;
  if (flags.out) c.out = *flags.out;
  if (flags.format) c.formats = parse_formats(*flags.format);
  if (flags.seed) c.seed = *flags.seed;
  if (flags.threads) c.threads = *flags.threads;
  if (flags.count) c.sweep_count = *flags.count;
  if (flags.cells) cells = flags.cells;
  if (flags.tol) tol = flags.tol;
  if (const char* env = std::getenv("RADIAL_BV_THREADS"); env && *env) c.threads = parse_threads_env(env);

  if (cells && *cells < 1) throw ConfigError("cells must be at least 1");
  if (tol && !(*tol > 0.0)) throw ConfigError("tol must be positive");
  // --cells and --tol address the main numerical kernel of each command
  if (command == "solve" || command == "sweep") {
    if (cells) c.solver.grid_nodes = *cells + 1;
    if (tol) c.solver.quad_tol = *tol;
  } else if (command == "oracle-compare" || command == "reg-study") {
    if (cells) c.oracle.cells = *cells;
    if (tol) c.oracle.tol = *tol;
  } else if (command == "verify") {
    if (cells) c.verify.oracle_cells = *cells;
  }
  c.verify.seed = c.seed;
  c.verify.threads = c.threads;

  validate(c);
  return c;
}

}  // namespace cli
