#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace radial_bv {

enum class ErrorCode {
  InvalidArgument,  // malformed input (bad radii, bad config)
  Domain,           // argument outside the mathematical domain of an operation
  Numeric,          // quadrature / root finding failed to converge
  NotConverged,     // iterative minimizer hit its iteration budget
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Short form of a number for messages.
inline std::string show(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

[[noreturn]] inline void throw_domain(const std::string& what) { throw Error(ErrorCode::Domain, what); }
[[noreturn]] inline void throw_invalid(const std::string& what) {
  throw Error(ErrorCode::InvalidArgument, what);
}
[[noreturn]] inline void throw_numeric(const std::string& what) { throw Error(ErrorCode::Numeric, what); }

}  // namespace radial_bv
