#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include "support.hpp"
#include "teis/eisenstein.hpp"
#include "teis/errors.hpp"
#include "teis/jacobian.hpp"
#include "teis/petersson.hpp"

using namespace teis;
using teis::test::eta11;
using teis::test::eta11_twist;
using teis::test::zero_twist;

namespace {

constexpr double kPi = std::numbers::pi;

// Pinned tolerances.
constexpr double kOracleTol = 1e-8;       // 1
constexpr double kSpotTol = 1e-10;        // 2
constexpr double kPipelineTol = 1e-6;     // 3
constexpr double kModularityTol = 1e-5;   // 4
constexpr double kHomomorphismTol = 1e-8; // 5
constexpr double kUnitTol = 4 * 2.220446049250313e-16;
constexpr double kShiftBudget = 1e-10;    // 6
constexpr double kDedekindTol = 1e-5;     // 7
constexpr double kRealityTol = 1e-6;      // 8
constexpr double kOrthoFactor = 1e-3;     // 10
constexpr i64 kMaxDen = 1000000;          // 11
constexpr double kScanTol = 1e-12;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

Outcome oracle_equivalence() {
  PrecisionBudget b;
  double worst = 0;
  for (i64 l : {1, 11})
    for (int k : {3, 4, 5}) {
      std::vector<i64> idx;
      for (i64 i : {0, 1, 2})
        if (std::find(idx.begin(), idx.end(), i % l) == idx.end()) idx.push_back(i % l);
      for (const auto& q : fourier_coeffs_multi(l, k, idx, *zero_twist(l), 20, b))
        for (i64 m = 0; m <= 20; ++m)
          worst = std::max(worst, std::abs(q.coeffs[m] - untwisted_normalized(l, k, q.twist_index, m).to_double()));
    }
  return {worst < kOracleTol, "max deviation " + g(worst)};
}

Outcome spot_values() {
  PrecisionBudget b;
  b.target_abs_error = 1e-12;
  const bool exact = untwisted_normalized(1, 4, 0, 0) == Rational(1, 720) &&
                     untwisted_normalized(11, 4, 1, 1) == Rational(3, 29282);
  const double r0 = fourier_coeffs(EisensteinSpec(1, 4, 0, zero_twist(1)), 0, b).coeffs[0].real();
  const double r1 = fourier_coeffs(EisensteinSpec(11, 4, 1, zero_twist(11)), 1, b).coeffs[1].real();
  const double d = std::max(std::fabs(r0 - 1.0 / 720), std::fabs(r1 - 3.0 / 29282));
  return {exact && d < kSpotTol, "r_0 = " + g(r0) + ", r_1 = " + g(r1) + ", deviation " + g(d)};
}

Outcome pipeline() {
  PrecisionBudget b;
  b.target_abs_error = 1e-8;
  const HalfPlanePoint pts[] = {{0.0, 1.0}, {0.3, 1.1}, {-0.45, 1.5}, {0.17, 2.0}, {0.5, 1.0}};
  const i64 M = 10;
  FourierOptions opt;
  for (i64 m = 0; m <= M; ++m) opt.targets.push_back(std::min(1e-3, 1e-9 * std::exp(2 * kPi * m)));
  double worst = 0;
  bool consistent = true;
  for (auto tw : {zero_twist(11), eta11_twist()}) {
    auto qs = fourier_coeffs_multi(11, 4, {0, 1}, *tw, M, b, opt);
    for (const auto& q : qs)
      for (const auto& tau : pts) {
        Estimate d = eval_direct(EisensteinSpec(11, 4, q.twist_index, tw), tau, b);
        Estimate f = q.evaluate(tau);
        const double diff = std::abs(d.value - f.value);
        worst = std::max(worst, diff);
        consistent &= diff <= d.error_bound + f.error_bound;
      }
  }
  return {worst < kPipelineTol && consistent,
          "max |direct - fourier| " + g(worst) + (consistent ? "" : ", outside combined bounds")};
}

HalfPlanePoint symmetric_point(const GroupElement& gam, double theta) {
  const double s = gam.c() > 0 ? 1.0 : -1.0;
  return HalfPlanePoint::from((cplx(-double(gam.d()), 0) + s * std::polar(1.0, theta)) / double(gam.c()));
}

Outcome transformation_law() {
  PrecisionBudget b;
  b.target_abs_error = 2e-6;
  std::mt19937_64 rng(2024);
  EisensteinSpec spec(11, 4, 1, eta11_twist());
  double worst = 0, min_flip = 1e300;
  int flips = 0;
  for (int j = 0; j < 20; ++j) {
    const bool g1 = j >= 10;
    GroupElement gam = g1 ? random_gamma1(11, 1, rng) : random_gamma0(11, 1, rng);
    HalfPlanePoint tau = symmetric_point(gam, 0.9 + 0.05 * j);
    Residual r = modularity_residual(spec, gam, tau, b);
    worst = std::max(worst, r.residual);
    const i64 a = mod(gam.a(), 11);
    if (!g1 && a != 1 && a != 10) {
      // |c tau + d| = 1, so the law without the flip is off by |E_{k,i} - E_{k,ai}| at tau.
      Estimate u = eval_direct(spec, tau, b), v = eval_direct(spec.with_index(a), tau, b);
      min_flip = std::min(min_flip, std::abs(u.value - v.value) - u.error_bound - v.error_bound);
      ++flips;
    }
  }
  const bool ok = worst < kModularityTol && flips > 0 && min_flip > kModularityTol;
  return {ok, "max residual " + g(worst) + ", " + std::to_string(flips) + " flips witnessed, min gap " + g(min_flip)};
}

Outcome character() {
  PrecisionBudget b;
  b.target_abs_error = 1e-12;
  std::mt19937_64 rng(5);
  double hom = 0, unit = 0;
  for (int j = 0; j < 100; ++j) {
    GroupElement x = random_gamma0(11, 5, rng), y = random_gamma0(11, 5, rng);
    cplx a = twist_character(eta11(), x, b), c = twist_character(eta11(), y, b);
    hom = std::max(hom, std::abs(twist_character(eta11(), x * y, b) - a * c));
    unit = std::max({unit, std::fabs(std::abs(a) - 1), std::fabs(std::abs(c) - 1)});
  }
  bool translations = true;
  for (i64 n : {-7, -1, 1, 3, 100}) translations &= twist_character(eta11(), GroupElement::T(n), b) == cplx(1);
  return {hom < kHomomorphismTol && unit <= kUnitTol && translations,
          "homomorphism defect " + g(hom) + ", unit defect " + g(unit) + (translations ? ", chi(T^n) = 1" : ", chi(T^n) != 1")};
}

Outcome shifts() {
  PrecisionBudget b;
  b.target_abs_error = kShiftBudget;
  std::mt19937_64 rng(6);
  double worst = 0;
  for (int j = 0; j < 50; ++j) {
    GroupElement gam = random_gamma0(11, 40, rng);
    Estimate a = H_cusp_via(eta11(), gam, b);
    for (i64 n : {-2, 1, 5}) worst = std::max(worst, std::fabs(H_cusp_via(eta11(), GroupElement::T(n) * gam, b).value.real() - a.value.real()));
  }
  return {worst <= 2 * kShiftBudget, "max shift deviation " + g(worst)};
}

Outcome dedekind() {
  PrecisionBudget b;
  b.target_abs_error = 1e-6;
  double worst = 0;
  bool bounded = true;
  for (auto tw : {zero_twist(11), eta11_twist()})
    for (i64 i : {0, 1})
      for (const HalfPlanePoint& tau : {HalfPlanePoint(0.1, 1.2), HalfPlanePoint(-0.3, 0.8), HalfPlanePoint(0.45, 1.0)}) {
        Residual r = dedekind_check(11, 4, i, *tw, tau, b);
        worst = std::max(worst, r.residual);
        bounded &= r.residual <= r.error_bound;
      }
  return {worst < kDedekindTol && bounded, "max residual " + g(worst)};
}

Outcome reality() {
  PrecisionBudget b;
  b.target_abs_error = 1e-7;
  double worst = 0;
  for (i64 i : {0, 1, 2}) worst = std::max(worst, reality_check(EisensteinSpec(11, 4, i, eta11_twist()), 10, b).residual);
  return {worst < kRealityTol, "max |Im r_m| " + g(worst)};
}

Outcome trivialization() {
  PrecisionBudget pb;
  pb.target_abs_error = 1e-11;
  TwistPoint p = TwistPoint::make(eta11(), pb);
  TrivializationScalars s = trivialization_scalars(p, 20);
  if (s.kind != TrivializationScalars::Kind::Discrete) return {false, std::string("kind ") + to_string(s.kind)};
  auto tw = std::make_shared<const Twist>(eta11().scaled(s.generator));
  PrecisionBudget b;
  FourierOptions opt;
  for (i64 m = 0; m <= 10; ++m) opt.targets.push_back(1e-10 * std::pow(m + 1.0, 3));
  auto qs = fourier_coeffs_multi(11, 4, {0, 1}, *tw, 10, b, opt);
  double worst = 0, excess = -1e300, rel = 0;
  for (const auto& q : qs)
    for (i64 m = 0; m <= 10; ++m) {
      const double exact = untwisted_normalized(11, 4, q.twist_index, m).to_double();
      const double d = std::abs(q.coeffs[m] - exact);
      worst = std::max(worst, d);
      excess = std::max(excess, d - q.errors[m]);
      rel = std::max(rel, q.errors[m] / std::fabs(exact));
    }
  return {excess <= 0, "lambda* = " + g(s.generator) + ", max deviation " + g(worst) + ", max relative bound " + g(rel)};
}

Outcome petersson() {
  auto j = read_json_file(test::data_path("cusp_l11_k4.json"));
  CuspFormEvaluator gf(series_from_json(j), j.at("fricke_sign").get<int>());
  UntwistedEisensteinEvaluator ef(11, 4, 1);
  QuadratureGrid q = QuadratureGrid::make(12, 24);
  PeterssonResult gg = inner(gf, gf, 4, 11, nullptr, q);
  PeterssonResult gg2 = inner(gf, gf, 4, 11, nullptr, q.refined());
  PeterssonResult eg = inner(ef, gf, 4, 11, nullptr, q);
  const double norm = gg.value.real();
  const bool positive = norm > gg.error_estimate;
  const double change = std::abs(gg2.value - gg.value);
  const bool stable = change <= std::max(gg.error_estimate, 1e-12 * norm);
  const bool ortho = std::abs(eg.value) < kOrthoFactor * norm;
  return {positive && stable && ortho, "<g,g> = " + g(norm) + ", refinement change " + g(change) +
                                           ", |<E,g>| = " + g(std::abs(eg.value))};
}

Outcome scan() {
  PrecisionBudget pb;
  TwistPoint z = TwistPoint::make(zero_form(11, 10), pb);
  PrecisionBudget b;
  b.target_abs_error = 1e-14;
  ScanReport r = rationality_scan(z, 4, 10, kMaxDen, kScanTol, b);
  std::size_t eligible = 0, matched = 0;
  for (const ScanEntry& e : r.entries) {
    if (!e.series) continue;
    auto q = test::exact_quotient(11, 4, e.i, e.j, 10)[e.m];
    if (denominator(q) > kMaxDen) continue;
    ++eligible;
    if (e.rational && e.rational->num() == static_cast<i64>(numerator(q)) &&
        e.rational->den() == static_cast<i64>(denominator(q)))
      ++matched;
  }
  return {eligible > 0 && matched == eligible, std::to_string(matched) + "/" + std::to_string(eligible) +
                                                   " coefficients with denominator <= 1e6 exact; " +
                                                   std::to_string(r.series_total - eligible) +
                                                   " larger-height coefficients not claimed"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion all[] = {
      {"untwisted oracle equivalence", oracle_equivalence},
      {"spot values", spot_values},
      {"direct vs Fourier", pipeline},
      {"transformation law", transformation_law},
      {"character soundness", character},
      {"completion shifts", shifts},
      {"Dedekind decomposition", dedekind},
      {"reality", reality},
      {"twist trivialization", trivialization},
      {"Petersson", petersson},
      {"rationality scan", scan},
  };
  int failed = 0, n = 0;
  for (const auto& c : all) {
    ++n;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %s: %s (%s; %.1fs)\n", n, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
