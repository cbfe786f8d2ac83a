#pragma once

#include <complex>
#include <cstdint>

namespace teis {

using cplx = std::complex<double>;

struct PrecisionBudget {
  double target_abs_error = 1e-8;
  std::int64_t max_lattice_radius = 20000;
  std::int64_t max_c_terms = 5000;
  std::int64_t max_q_terms = 400000;

  /// Throws InvalidArgument unless every field is positive and finite.
  void validate() const;
  PrecisionBudget with_target(double t) const {
    PrecisionBudget b = *this;
    b.target_abs_error = t;
    return b;
  }
};

/// A value together with a bound on its absolute error.
struct Estimate {
  cplx value{};
  double error_bound = 0.0;
};

}  // namespace teis
