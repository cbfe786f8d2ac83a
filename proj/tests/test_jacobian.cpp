#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "teis/errors.hpp"
#include "teis/jacobian.hpp"

using namespace teis;
using teis::test::eta11;

namespace {

PrecisionBudget period_budget() {
  PrecisionBudget b;
  b.target_abs_error = 1e-11;
  return b;
}

const TwistPoint& eta_point() {
  static const TwistPoint p = TwistPoint::make(eta11(), period_budget());
  return p;
}

double frac_dist(double x) { return std::fabs(x - std::round(x)); }

}  // namespace

TEST_CASE("zero twist is trivial and every scalar works") {
  TwistPoint z = TwistPoint::make(zero_form(11, 10), period_budget());
  TrivialityVerdict v = is_trivial_twist(z, 1e-8);
  CHECK(v.trivial);
  for (double d : v.distances) CHECK(d == 0.0);
  TrivializationScalars s = trivialization_scalars(z, 20);
  CHECK(s.kind == TrivializationScalars::Kind::Dense);
  CHECK(std::string(to_string(s.kind)) == "dense");
}

TEST_CASE("eta product of level 11") {
  const TwistPoint& p = eta_point();
  TrivialityVerdict v = is_trivial_twist(p, 1e-8);
  CHECK_FALSE(v.trivial);
  double worst = 0;
  for (double d : v.distances) worst = std::max(worst, d);
  CHECK(std::fabs(worst - 0.23217787565036) < 1e-9);

  TrivializationScalars s = trivialization_scalars(p, 20);
  REQUIRE(s.kind == TrivializationScalars::Kind::Discrete);
  // One nonzero period up to sign: lambda* = 1 / rho.
  CHECK(std::fabs(s.generator - 1 / 0.23217787565036) < 1e-8);
  CHECK(s.generator_error < 1e-6);
  CHECK(s.scalars.size() == 9);
  for (double lam : s.scalars) CHECK(std::fabs(lam) <= 20);

  // Group structure.
  const double l1 = s.scalars[5], l2 = s.scalars[7];
  for (double lam : {l1 + l2, -l1, l2 - l1})
    for (double r : p.periods.re_periods) CHECK(frac_dist(lam * r) < 1e-8);
  // A non-multiple does not trivialize.
  bool all_integral = true;
  for (double r : p.periods.re_periods) all_integral &= frac_dist(0.37 * r) < 1e-8;
  CHECK_FALSE(all_integral);
}

TEST_CASE("scaled twist point becomes trivial") {
  const double lam = trivialization_scalars(eta_point(), 20).generator;
  TwistPoint q = TwistPoint::combination({eta11()}, {lam}, period_budget());
  CHECK(q.level == 11);
  CHECK(is_trivial_twist(q, 1e-8).trivial);
  TwistPoint r = TwistPoint::combination({eta11(), eta11()}, {lam, -lam}, period_budget());
  CHECK(is_trivial_twist(r, 1e-8).trivial);
  CHECK_THROWS_AS(TwistPoint::combination({eta11()}, {1.0, 2.0}, period_budget()), InvalidArgument);
  CHECK_THROWS_AS(TwistPoint::combination({eta11(), zero_form(14, 5)}, {1.0, 2.0}, period_budget()), InvalidArgument);
}

TEST_CASE("imprecise periods are inconclusive") {
  PrecisionBudget b;
  b.target_abs_error = 1e-4;
  TwistPoint p = TwistPoint::make(eta11().truncated(2000), b);
  CHECK_THROWS_AS(is_trivial_twist(p, 1e-10), Inconclusive);
  CHECK_THROWS_AS(trivialization_scalars(p, 20, 1e-10), Inconclusive);
}

TEST_CASE("trivializing scalar leaves the Eisenstein series unchanged") {
  const double lam = trivialization_scalars(eta_point(), 20).generator;
  auto tw = std::make_shared<const Twist>(eta11().scaled(lam));
  PrecisionBudget b;
  FourierOptions opt;
  const i64 M = 4;
  for (i64 m = 0; m <= M; ++m) opt.targets.push_back(1e-8 * std::pow(m + 1.0, 3));
  auto qs = fourier_coeffs_multi(11, 4, {0, 1, 2}, *tw, M, b, opt);
  for (const auto& q : qs)
    for (i64 m = 0; m <= M; ++m) {
      const double exact = untwisted_normalized(11, 4, q.twist_index, m).to_double();
      CHECK(std::abs(q.coeffs[m] - exact) <= q.errors[m]);
    }
}

TEST_CASE("series quotient") {
  QExpansion num, den;
  // (1 + q) / (1 - q) = 1 + 2q + 2q^2 + ...
  num.coeffs = {1.0, 1.0, 0.0, 0.0};
  num.errors = {0, 0, 0, 0};
  den.coeffs = {1.0, -1.0, 0.0, 0.0};
  den.errors = {0, 0, 0, 0};
  SeriesQuotient s = series_quotient(num, den);
  CHECK(s.coeffs[0] == cplx(1));
  for (int m = 1; m <= 3; ++m) CHECK(std::abs(s.coeffs[m] - 2.0) < 1e-15);
  den.coeffs[0] = 1e-9;
  den.errors[0] = 1e-8;
  CHECK_THROWS_AS(series_quotient(num, den), DivisionDegenerate);
}

TEST_CASE("rationality scan without twist agrees with the exact quotients") {
  TwistPoint z = TwistPoint::make(zero_form(11, 10), period_budget());
  PrecisionBudget b;
  b.target_abs_error = 1e-14;
  const i64 M = 4;
  ScanReport r = rationality_scan(z, 4, M, 1000000, 1e-12, b);
  CHECK(r.zero_series.empty());
  CHECK(r.series_total == 11 * 11 * (M + 1));
  std::size_t checked = 0;
  for (const ScanEntry& e : r.entries) {
    if (!e.series) continue;
    auto q = test::exact_quotient(11, 4, e.i, e.j, M)[e.m];
    if (denominator(q) > 1000000) continue;
    ++checked;
    REQUIRE(e.rational);
    CHECK(e.verdict == "rational");
    CHECK(e.rational->num() == static_cast<i64>(numerator(q)));
    CHECK(e.rational->den() == static_cast<i64>(denominator(q)));
  }
  CHECK(checked > 100);
  CHECK_THROWS_AS(rationality_scan(z, 2, M, 10, 1e-12, b), InvalidArgument);
}
