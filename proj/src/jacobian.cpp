#include "teis/jacobian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "teis/errors.hpp"

namespace teis {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
}

TwistPoint TwistPoint::make(FourierSeries h, const PrecisionBudget& budget) {
  h.require_weight2_cusp_form("TwistPoint");
  TwistPoint p{h.level(), h, period_data(h, h.level(), budget)};
  return p;
}

TwistPoint TwistPoint::combination(const std::vector<FourierSeries>& forms, const std::vector<double>& coeffs,
                                   const PrecisionBudget& budget) {
  if (forms.empty() || forms.size() != coeffs.size())
    throw InvalidArgument("TwistPoint::combination: need one coefficient per form");
  const i64 l = forms[0].level();
  i64 N = forms[0].degree();
  for (const auto& f : forms) {
    if (f.level() != l) throw InvalidArgument("TwistPoint::combination: forms have different levels");
    N = std::min(N, f.degree());
  }
  std::vector<cplx> a(N + 1, 0.0);
  std::vector<double> e(N + 1, 0.0);
  for (std::size_t j = 0; j < forms.size(); ++j)
    for (i64 n = 0; n <= N; ++n) {
      a[n] += coeffs[j] * forms[j][n];
      e[n] += std::fabs(coeffs[j]) * forms[j].error_bounds()[n];
    }
  return make(FourierSeries(l, 2, std::move(a), std::move(e)), budget);
}

TrivialityVerdict is_trivial_twist(const TwistPoint& p, double tol) {
  if (!(tol > 0)) throw InvalidArgument("is_trivial_twist: tol must be positive");
  TrivialityVerdict v;
  v.trivial = true;
  for (std::size_t j = 0; j < p.periods.re_periods.size(); ++j) {
    if (p.periods.error_bounds[j] > tol / 2)
      throw Inconclusive("is_trivial_twist: period " + std::to_string(j) + " has error bound " +
                         fmt_g(p.periods.error_bounds[j]) + " > tol/2");
    const double r = p.periods.re_periods[j];
    const double dist = std::fabs(r - std::round(r));
    v.distances.push_back(dist);
    if (dist > tol) v.trivial = false;
  }
  return v;
}

const char* to_string(TrivializationScalars::Kind k) {
  switch (k) {
    case TrivializationScalars::Kind::Dense: return "dense";
    case TrivializationScalars::Kind::Discrete: return "discrete";
    case TrivializationScalars::Kind::NonDiscrete: return "non-discrete";
  }
  return "?";
}

TrivializationScalars trivialization_scalars(const TwistPoint& p, double max_height, double tol) {
  if (!(tol > 0) || !(max_height > 0)) throw InvalidArgument("trivialization_scalars: tol and max_height must be positive");
  std::vector<double> vals;
  double err = 0;
  for (std::size_t j = 0; j < p.periods.re_periods.size(); ++j) {
    if (p.periods.error_bounds[j] > tol / 2)
      throw Inconclusive("trivialization_scalars: period " + std::to_string(j) + " has error bound " +
                         fmt_g(p.periods.error_bounds[j]) + " > tol/2");
    err = std::max(err, p.periods.error_bounds[j]);
    if (std::fabs(p.periods.re_periods[j]) > tol) vals.push_back(std::fabs(p.periods.re_periods[j]));
  }
  TrivializationScalars out;
  if (vals.empty()) return out;
  // Euclid on reals: the generator of the additive group spanned by the periods.
  double g = vals[0];
  for (std::size_t j = 1; j < vals.size(); ++j) {
    double a = g, b = vals[j];
    int steps = 0;
    while (b > tol) {
      double r = std::fabs(a - std::round(a / b) * b);
      a = b;
      b = r;
      if (++steps > 60) {
        out.kind = TrivializationScalars::Kind::NonDiscrete;
        return out;
      }
    }
    g = a;
  }
  const double lambda = 1 / g;
  for (double v : vals)
    if (std::fabs(v * lambda - std::round(v * lambda)) > tol * lambda * 10) {
      out.kind = TrivializationScalars::Kind::NonDiscrete;
      return out;
    }
  out.kind = TrivializationScalars::Kind::Discrete;
  out.generator = lambda;
  out.generator_error = lambda * lambda * (err + tol);
  const i64 nmax = static_cast<i64>(std::floor(max_height / lambda));
  for (i64 n = -nmax; n <= nmax; ++n) out.scalars.push_back(n * lambda);
  return out;
}

SeriesQuotient series_quotient(const QExpansion& num, const QExpansion& den) {
  const i64 M = std::min(num.degree(), den.degree());
  const cplx b0 = den.coeffs[0];
  const double e0 = den.errors[0];
  if (!(std::abs(b0) > e0))
    throw DivisionDegenerate("series quotient: leading coefficient of E_{k," + std::to_string(den.twist_index) +
                             "} is below its error bound");
  SeriesQuotient q;
  q.coeffs.resize(M + 1);
  q.errors.resize(M + 1);
  const double lower = std::abs(b0) - e0;
  for (i64 m = 0; m <= M; ++m) {
    cplx s = num.coeffs[m];
    double err = num.errors[m], mag = std::abs(s);
    for (i64 j = 1; j <= m; ++j) {
      const cplx t = den.coeffs[j] * q.coeffs[m - j];
      s -= t;
      mag += std::abs(t);
      err += den.errors[j] * std::abs(q.coeffs[m - j]) + (std::abs(den.coeffs[j]) + den.errors[j]) * q.errors[m - j];
    }
    q.coeffs[m] = s / b0;
    q.errors[m] = (err + std::abs(q.coeffs[m]) * e0 + 4 * (m + 2) * kEps * mag) / lower;
  }
  return q;
}

namespace {

void judge(ScanEntry& e, i64 max_den, double tol) {
  if (!e.value) {
    e.verdict = "undefined";
    return;
  }
  e.rational = std::nullopt;
  if (std::fabs(e.value->imag()) < tol) e.rational = rational_reconstruct(e.value->real(), tol, max_den);
  if (e.rational)
    e.verdict = "rational";
  else
    e.verdict = e.error > tol ? "imprecise" : "not-reconstructed";
}

bool numerically_zero(const QExpansion& q) {
  for (i64 m = 0; m <= q.degree(); ++m)
    if (std::abs(q.coeffs[m]) > q.errors[m]) return false;
  return true;
}

}  // namespace

ScanReport rationality_scan(const TwistPoint& p, int k, i64 M, i64 max_den, double tol,
                            const PrecisionBudget& budget, int threads) {
  if (k < 3) throw InvalidArgument("rationality_scan: weight must be >= 3");
  if (M < 0 || max_den < 1 || !(tol > 0)) throw InvalidArgument("rationality_scan: need M >= 0, max_den >= 1, tol > 0");
  const i64 l = p.level;
  Twist twist(p.form);
  std::vector<i64> idx(l);
  for (i64 i = 0; i < l; ++i) idx[i] = i;
  FourierOptions opt;
  opt.threads = threads;
  ScanReport r;
  r.level = l;
  r.weight = k;
  r.M = M;
  r.max_den = max_den;
  r.tol = tol;
  r.expansions = fourier_coeffs_multi(l, k, idx, twist, M, budget, opt);
  for (i64 j = 0; j < l; ++j)
    if (numerically_zero(r.expansions[j])) r.zero_series.push_back(j);
  auto skipped = [&](i64 j) { return std::find(r.zero_series.begin(), r.zero_series.end(), j) != r.zero_series.end(); };
  for (i64 i = 0; i < l; ++i)
    for (i64 j = 0; j < l; ++j) {
      if (skipped(j)) continue;
      const auto& a = r.expansions[i];
      const auto& b = r.expansions[j];
      SeriesQuotient q = series_quotient(a, b);
      for (i64 m = 0; m <= M; ++m) {
        ScanEntry e;
        e.i = i, e.j = j, e.m = m, e.series = true;
        e.value = q.coeffs[m];
        e.error = q.errors[m];
        judge(e, max_den, tol);
        ++r.series_total;
        if (e.rational) {
          ++r.series_rational;
          r.max_height = std::max<i64>({r.max_height, static_cast<i64>(std::llabs(e.rational->num())), e.rational->den()});
        }
        r.entries.push_back(e);
      }
      for (i64 m = 0; m <= M; ++m) {
        ScanEntry e;
        e.i = i, e.j = j, e.m = m, e.series = false;
        if (std::abs(b.coeffs[m]) > b.errors[m]) {
          e.value = a.coeffs[m] / b.coeffs[m];
          const double lower = std::abs(b.coeffs[m]) - b.errors[m];
          e.error = (a.errors[m] + std::abs(*e.value) * b.errors[m]) / lower + 4 * kEps * std::abs(*e.value);
        }
        judge(e, max_den, tol);
        ++r.coefwise_total;
        if (e.rational) ++r.coefwise_rational;
        r.entries.push_back(e);
      }
    }
  return r;
}

}  // namespace teis
