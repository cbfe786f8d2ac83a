#pragma once

#include <optional>
#include <string>
#include <vector>

#include "teis/arith.hpp"
#include "teis/cuspform.hpp"
#include "teis/eisenstein.hpp"

namespace teis {

/// A twist h together with its real periods on generators of Gamma0(l).
struct TwistPoint {
  i64 level = 1;
  FourierSeries form;
  PeriodData periods;

  static TwistPoint make(FourierSeries h, const PrecisionBudget& budget);
  /// sum_j coeffs[j] * forms[j], for levels of higher genus.
  static TwistPoint combination(const std::vector<FourierSeries>& forms, const std::vector<double>& coeffs,
                                const PrecisionBudget& budget);
};

struct TrivialityVerdict {
  bool trivial = false;
  std::vector<double> distances;  // distance of each re_period to the nearest integer
};

/// Throws Inconclusive if some period error bound exceeds tol / 2.
TrivialityVerdict is_trivial_twist(const TwistPoint& p, double tol);

struct TrivializationScalars {
  enum class Kind { Dense, Discrete, NonDiscrete };
  Kind kind = Kind::Dense;
  double generator = 0.0;         // lambda*, when discrete
  double generator_error = 0.0;
  std::vector<double> scalars;    // all n lambda* with |n lambda*| <= max_height, ascending
};

const char* to_string(TrivializationScalars::Kind k);

TrivializationScalars trivialization_scalars(const TwistPoint& p, double max_height, double tol = 1e-8);

/// Formal quotient num/den of q-series with propagated error bounds.
struct SeriesQuotient {
  std::vector<cplx> coeffs;
  std::vector<double> errors;
};
SeriesQuotient series_quotient(const QExpansion& num, const QExpansion& den);

struct ScanEntry {
  i64 i = 0, j = 0, m = 0;
  bool series = true;  // false for the coefficientwise quotient
  std::optional<cplx> value;
  double error = 0.0;
  std::optional<Rational> rational;
  std::string verdict;  // "rational", "not-reconstructed", "imprecise", "undefined"
};

struct ScanReport {
  i64 level = 1;
  int weight = 3;
  i64 M = 0;
  i64 max_den = 1;
  double tol = 0.0;
  std::vector<i64> zero_series;  // indices j with E_{k,j;h} numerically 0, skipped as denominators
  std::vector<QExpansion> expansions;
  std::vector<ScanEntry> entries;
  std::size_t series_total = 0, series_rational = 0;
  std::size_t coefwise_total = 0, coefwise_rational = 0;
  i64 max_height = 0;
};

ScanReport rationality_scan(const TwistPoint& p, int k, i64 M, i64 max_den, double tol,
                            const PrecisionBudget& budget, int threads = 1);

}  // namespace teis
