#pragma once

#include "radial_bv/density.hpp"

#include <string>

namespace radial_bv::detail {

// Family-specific implementation behind EnergyDensity. Arguments are already
// validated (t >= 0, s and gap in range) by the public wrapper.
class DensityModel {
 public:
  virtual ~DensityModel() = default;

  virtual DensityFamily family() const = 0;
  virtual double g(double t) const = 0;
  virtual double g_prime(double t) const = 0;
  virtual double g_second(double t) const = 0;
  virtual double deficit(double t) const = 0;
  virtual double g_prime_inf() const = 0;
  virtual bool g_prime_inf_estimated() const { return false; }
  virtual double mu() const = 0;
  virtual double mu_bar() const = 0;
  virtual double shape_parameter() const;
  virtual std::string describe() const = 0;

  // Default inverses solve in log t with a bracketing root finder; families
  // with closed forms override them.
  virtual double inv_g_prime(double s) const;
  virtual double inv_deficit(double gap) const;
};

}  // namespace radial_bv::detail
