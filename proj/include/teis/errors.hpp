#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace teis {

/// Short %g rendering for diagnostics.
inline std::string fmt_g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Violated precondition or type invariant.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class UnsupportedLevel : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// The truncation needed for the requested accuracy exceeds a budget cap.
class PrecisionUnreachable : public Error {
 public:
  PrecisionUnreachable(const std::string& what, double achievable)
      : Error(what), achievable_(achievable) {}
  double achievable_error() const noexcept { return achievable_; }

 private:
  double achievable_;
};

class Inconclusive : public Error {
 public:
  using Error::Error;
};

class DivisionDegenerate : public Error {
 public:
  using Error::Error;
};

class NonconvergentIntegrand : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace teis
