#pragma once

#include <complex>
#include <memory>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "teis/arith.hpp"
#include "teis/budget.hpp"
#include "teis/modular_group.hpp"

namespace teis {

/// Truncated q-expansion a_0..a_N with per-coefficient error bounds.
class FourierSeries {
 public:
  FourierSeries(i64 level, int weight, std::vector<cplx> coefficients,
                std::vector<double> error_bounds = {});

  i64 level() const { return level_; }
  int weight() const { return weight_; }
  /// Highest stored index N.
  i64 degree() const { return static_cast<i64>(coeffs_.size()) - 1; }
  const cplx& operator[](i64 n) const { return coeffs_[n]; }
  const std::vector<cplx>& coefficients() const { return coeffs_; }
  const std::vector<double>& error_bounds() const { return errors_; }
  double max_error_bound() const;

  bool is_cusp_form() const { return coeffs_[0] == 0.0; }
  bool is_zero() const;
  bool has_real_coefficients() const;
  FourierSeries scaled(double lambda) const;
  FourierSeries truncated(i64 N) const;
  /// Throws InvalidArgument unless this is a weight-2 cusp form.
  void require_weight2_cusp_form(const char* who) const;

 private:
  i64 level_;
  int weight_;
  std::vector<cplx> coeffs_;
  std::vector<double> errors_;
};

/// Exact integer coefficients of prod_j eta(m_j tau)^{e_j} q^{-shift}, where shift =
/// sum m_j e_j / 24 must be an integer; returns the coefficients of q^shift .. q^{shift+N}.
std::vector<i64> eta_quotient_coefficients(const std::vector<std::pair<int, int>>& factors, i64 N);

/// Weight-2 newform eta products for l in {11, 14, 15}; a_0..a_N.
FourierSeries eta_product_weight2(i64 l, i64 N);

FourierSeries zero_form(i64 l, i64 N, int weight = 2);

/// max_n |a_n| / n over stored coefficients, used as the constant C in |a_n| <= C n.
double hecke_constant(const FourierSeries& h);

/// The rational -d/c with l | c; c = 0 is the cusp at infinity.
class CuspRational {
 public:
  CuspRational(i64 c, i64 d, i64 l);
  i64 c() const { return c_; }
  i64 d() const { return d_; }

 private:
  i64 c_, d_;
};

Estimate H_upper(const FourierSeries& h, HalfPlanePoint tau, const PrecisionBudget& budget);
Estimate H_cusp(const FourierSeries& h, const CuspRational& r, const PrecisionBudget& budget);
/// H_cusp with an explicit completion gamma of the bottom row (used for b-shift checks).
Estimate H_cusp_via(const FourierSeries& h, const GroupElement& gamma, const PrecisionBudget& budget);
cplx twist_character(const FourierSeries& h, const GroupElement& gamma, const PrecisionBudget& budget);

struct PeriodData {
  i64 level = 1;
  std::vector<GroupElement> generators;
  std::vector<double> re_periods;
  std::vector<double> error_bounds;
};

PeriodData period_data(const FourierSeries& h, i64 l, const PrecisionBudget& budget);

/// Re H(-d/c) for every d in [0, c) with gcd(d, c) = 1 (NaN elsewhere), from one FFT.
struct PeriodTable {
  i64 denominator = 1;
  std::vector<double> re_h;
  double error_bound = 0.0;
};

// hecke < 0 recomputes hecke_constant(h).
PeriodTable period_table(const FourierSeries& h, i64 c, double target, i64 max_q_terms, double hecke = -1);

/// A weight-2 cusp form used as a twist, with a concurrent cache of period tables.
class Twist {
 public:
  explicit Twist(FourierSeries h, double period_target = 1e-13, i64 max_q_terms = 4000000);

  const FourierSeries& form() const { return h_; }
  i64 level() const { return h_.level(); }
  bool is_zero() const { return zero_; }
  double period_target() const { return target_; }
  i64 max_q_terms() const { return max_q_; }
  double hecke() const { return hecke_; }

  /// Table for denominator c (> 0), computed once; concurrent callers may race, first insert wins.
  std::shared_ptr<const PeriodTable> table(i64 c) const;
  /// Re H(-d/c) after reducing the fraction; 0 for c = 0.
  double re_period(i64 c, i64 d) const;
  /// Uniform bound on the error of any re_period value returned so far.
  double period_error() const;

 private:
  FourierSeries h_;
  bool zero_;
  double target_;
  i64 max_q_;
  double hecke_;
  mutable std::shared_mutex mu_;
  mutable std::unordered_map<i64, std::shared_ptr<const PeriodTable>> cache_;
  mutable double max_err_ = 0.0;
};

}  // namespace teis
