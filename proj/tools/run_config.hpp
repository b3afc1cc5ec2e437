#pragma once

// Run configuration of the command-line front end: defaults, then the JSON
// config file, then command-line flags (flags win).

#include "radial_bv/radial_bv.h"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cli {

/// Malformed configuration; reported with exit status 64.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One term c (1+t)^(-e) of a custom curvature psi.
struct PsiTerm {
  double c = 1.0;
  double e = 3.0;
};

struct DensitySpec {
  /// phi-mu | g-tilde-k | minimal-surface | custom
  std::string family = "phi-mu";
  double mu = 2.0;
  double k = 2.0;
  /// custom only; defaults to mu
  std::optional<double> mu_bar;
  std::vector<PsiTerm> psi;
  /// wraps the density as delta Phi_tau + g when set
  std::optional<double> reg_delta;
  std::optional<double> reg_tau;
};

struct RunConfig {
  std::string command;
  DensitySpec density;
  rbv_problem problem{1.0, 2.0, 0.0, 1.0};
  std::string out = "radial_bv_out";
  std::vector<std::string> formats{"csv", "json"};
  std::uint64_t seed = 1;
  /// 0 selects the available parallelism
  std::size_t threads = 0;

  rbv_solver_options solver = rbv_solver_options_default();
  rbv_oracle_config oracle = rbv_oracle_config_default();
  rbv_agreement_thresholds thresholds = rbv_agreement_thresholds_default();
  std::size_t sweep_count = 100;
  rbv_verify_config verify = rbv_verify_config_default();
  std::vector<double> reg_deltas{1e-1, 1e-2, 1e-3, 1e-4};
  std::vector<rbv_oracle_mode> reg_modes{RBV_ORACLE_QUADRATIC_REG, RBV_ORACLE_DENSITY_REG};

  bool wants(const std::string& format) const;
};

/// Values given on the command line; unset members leave the config alone.
struct FlagOverrides {
  std::optional<std::string> config;
  std::optional<std::string> density;
  std::optional<double> mu;
  std::optional<double> k;
  std::optional<double> rho1;
  std::optional<double> rho2;
  std::optional<double> m1;
  std::optional<double> m2;
  std::optional<std::size_t> cells;
  std::optional<double> tol;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::optional<std::size_t> count;
};

/// Merges defaults, the config file and the flags for `command`, then
/// validates. RADIAL_BV_THREADS, when set, overrides the worker count.
RunConfig build_config(const std::string& command, const FlagOverrides& flags);

/// Applies a parsed JSON config object; unknown keys are errors.
void apply_json(RunConfig& cfg, const nlohmann::json& j);

std::vector<std::string> parse_formats(const std::string& list);

const char* mode_name(rbv_oracle_mode mode);

}  // namespace cli
