#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"
#include "teis/eisenstein.hpp"
#include "teis/errors.hpp"

using namespace teis;
using teis::test::eta11_twist;
using teis::test::zero_twist;

namespace {

constexpr double kPi = std::numbers::pi;

i64 sigma(int s, i64 m) {
  i64 t = 0;
  for (i64 d : divisors(m)) {
    i64 p = 1;
    for (int j = 0; j < s; ++j) p *= d;
    t += p;
  }
  return t;
}

}  // namespace

TEST_CASE("weight and level validation") {
  CHECK_THROWS_WITH_AS(EisensteinSpec(11, 2, 0, zero_twist(11)), doctest::Contains("k >= 3"), InvalidArgument);
  CHECK_THROWS_AS(EisensteinSpec(11, 4, 0, zero_twist(1)), InvalidArgument);
  CHECK_THROWS_AS(EisensteinSpec(11, 4, 0, nullptr), InvalidArgument);
  CHECK(EisensteinSpec(11, 4, 13, zero_twist(11)).twist_index() == 2);
  CHECK_THROWS_AS(untwisted_exact(11, 2, 0, 1), InvalidArgument);
}

TEST_CASE("untwisted coefficients: spot values") {
  CHECK(untwisted_normalized(1, 4, 0, 0) == Rational(1, 720));
  CHECK(untwisted_normalized(11, 4, 1, 1) == Rational(3, 29282));
  CHECK(untwisted_normalized(11, 4, 1, 0) == Rational(97, 87846));
}

TEST_CASE("untwisted coefficients: level one against the classical expansion") {
  // G_k = 2 zeta(k) + 2 (2 pi i)^k / (k-1)! sum sigma_{k-1}(n) q^n.
  CHECK(untwisted_normalized(1, 6, 0, 0) == Rational(-1, 30240));
  for (i64 m = 1; m <= 20; ++m) {
    CHECK(untwisted_normalized(1, 4, 0, m) == Rational(sigma(3, m), 3));
    CHECK(untwisted_normalized(1, 6, 0, m) == Rational(sigma(5, m), 60));
  }
  for (i64 m = 0; m <= 10; ++m) CHECK(untwisted_normalized(1, 3, 0, m) == Rational(0));
}

TEST_CASE("numeric pipeline reproduces the exact coefficients when h = 0") {
  PrecisionBudget b;
  for (int k : {3, 4}) {
    auto qs = fourier_coeffs_multi(11, k, {0, 1, 5}, *zero_twist(11), 12, b);
    for (const auto& q : qs)
      for (i64 m = 0; m <= 12; ++m) {
        const double exact = untwisted_normalized(11, k, q.twist_index, m).to_double();
        CHECK(std::abs(q.coeffs[m] - exact) <= q.errors[m] + 1e-15);
        CHECK(q.errors[m] < 1e-10);
      }
  }
}

TEST_CASE("direct lattice sum against the Fourier expansion") {
  PrecisionBudget b;
  b.target_abs_error = 1e-7;
  const HalfPlanePoint tau(0.3, 1.1);
  for (auto tw : {zero_twist(11), eta11_twist()}) {
    EisensteinSpec spec(11, 4, 1, tw);
    Estimate d = eval_direct(spec, tau, b);
    std::vector<double> targets(9);
    for (i64 m = 0; m <= 8; ++m) targets[m] = 1e-9 * std::exp(2 * kPi * tau.y * m);
    FourierOptions opt;
    opt.targets = targets;
    QExpansion q = fourier_coeffs_multi(11, 4, {1}, *tw, 8, b, opt)[0];
    Estimate f = q.evaluate(tau);
    CHECK(std::abs(d.value - f.value) <= d.error_bound + f.error_bound);
    CHECK(std::abs(d.value - f.value) < 1e-6);
  }
}

TEST_CASE("lattice tail bound") {
  const HalfPlanePoint tau(0.2, 0.9);
  double prev = lattice_tail_bound(11, 4, tau, 50);
  for (double R : {100.0, 200.0, 400.0}) {
    const double t = lattice_tail_bound(11, 4, tau, R);
    CHECK(t < prev);
    prev = t;
  }
  PrecisionBudget lo, hi;
  lo.target_abs_error = 1e-4;
  hi.target_abs_error = 1e-8;
  EisensteinSpec spec(11, 4, 0, zero_twist(11));
  Estimate a = eval_direct(spec, tau, lo), c = eval_direct(spec, tau, hi);
  CHECK(std::abs(a.value - c.value) <= a.error_bound + c.error_bound);
  PrecisionBudget tight;
  tight.target_abs_error = 1e-14;
  tight.max_lattice_radius = 100;
  CHECK_THROWS_AS(eval_direct(spec, tau, tight), PrecisionUnreachable);
}

TEST_CASE("odd weight level one vanishes") {
  PrecisionBudget b;
  Estimate e = eval_direct(EisensteinSpec(1, 3, 0, zero_twist(1)), HalfPlanePoint(0.2, 1.4), b);
  CHECK(std::abs(e.value) <= e.error_bound);
  CHECK(e.error_bound < 1e-8);
}

TEST_CASE("twisted Fourier engine reports unreachable targets") {
  PrecisionBudget b;
  b.max_c_terms = 10;
  CHECK_THROWS_AS(fourier_coeffs(EisensteinSpec(11, 4, 1, eta11_twist()), 10, b), PrecisionUnreachable);
}

TEST_CASE("Dedekind decomposition") {
  PrecisionBudget b;
  b.target_abs_error = 1e-6;
  for (auto tw : {zero_twist(11), eta11_twist()}) {
    Residual r = dedekind_check(11, 4, 1, *tw, HalfPlanePoint(0.1, 1.2), b);
    CHECK(r.residual < 1e-5);
    CHECK(r.residual <= r.error_bound);
  }
}

TEST_CASE("transformation law with the index flip") {
  PrecisionBudget b;
  b.target_abs_error = 4e-6;
  GroupElement g = GroupElement::from_bottom_row(11, 3);  // a = 4 mod 11
  const HalfPlanePoint tau = HalfPlanePoint::from((cplx(-3, 0) + std::polar(1.0, 1.1)) / 11.0);
  EisensteinSpec spec(11, 4, 1, eta11_twist());
  Residual r = modularity_residual(spec, g, tau, b);
  CHECK(r.residual < 1e-5);
  // Without the flip i -> a i the law fails.
  Estimate wrong = eval_direct(spec, tau, b);
  Estimate right = eval_direct(spec.with_index(4), tau, b);
  CHECK(std::abs(wrong.value - right.value) > 1e-3);
  CHECK_THROWS_AS(modularity_residual(spec, GroupElement::S(), tau, b), InvalidArgument);
}

TEST_CASE("reality of the coefficients") {
  PrecisionBudget b;
  b.target_abs_error = 1e-7;
  Residual r = reality_check(EisensteinSpec(11, 4, 1, eta11_twist()), 4, b);
  CHECK(r.residual < 1e-6);
}

TEST_CASE("expansion evaluation and conversions") {
  PrecisionBudget b;
  QExpansion q = fourier_coeffs(EisensteinSpec(1, 4, 0, zero_twist(1)), 6, b);
  FourierSeries raw = q.raw();
  // R_0 = 2 zeta(4).
  CHECK(std::abs(raw[0] - 2 * std::pow(kPi, 4) / 90) < 1e-12);
  CHECK(q.normalized()[1] == q.coeffs[1]);
  const HalfPlanePoint tau(0.0, 1.0);
  Estimate v = q.evaluate(tau);
  Estimate d = eval_direct(EisensteinSpec(1, 4, 0, zero_twist(1)), tau, b.with_target(1e-6));
  CHECK(std::abs(v.value - d.value) <= v.error_bound + d.error_bound);
}
