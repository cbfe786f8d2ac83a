#include "teis/cuspform.hpp"

#include <fftw3.h>

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include "teis/errors.hpp"
#include "teis/summation.hpp"

namespace teis {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();
}  // namespace

FourierSeries::FourierSeries(i64 level, int weight, std::vector<cplx> coefficients,
                             std::vector<double> error_bounds)
    : level_(level), weight_(weight), coeffs_(std::move(coefficients)), errors_(std::move(error_bounds)) {
  if (level_ < 1) throw InvalidArgument("FourierSeries: level must be >= 1");
  if (coeffs_.size() < 2) throw InvalidArgument("FourierSeries: need at least a_0 and a_1 (N >= 1)");
  if (errors_.empty()) errors_.assign(coeffs_.size(), 0.0);
  if (errors_.size() != coeffs_.size())
    throw InvalidArgument("FourierSeries: error_bound length differs from coefficient count");
  for (std::size_t n = 0; n < coeffs_.size(); ++n) {
    if (!std::isfinite(coeffs_[n].real()) || !std::isfinite(coeffs_[n].imag()))
      throw InvalidArgument("FourierSeries: coefficient " + std::to_string(n) + " is not finite");
    if (!std::isfinite(errors_[n]) || errors_[n] < 0)
      throw InvalidArgument("FourierSeries: error_bound " + std::to_string(n) +
                            " must be finite and nonnegative");
  }
}

double FourierSeries::max_error_bound() const {
  double m = 0;
  for (double e : errors_) m = std::max(m, e);
  return m;
}

bool FourierSeries::is_zero() const {
  for (const auto& a : coeffs_)
    if (a != 0.0) return false;
  return true;
}

bool FourierSeries::has_real_coefficients() const {
  for (const auto& a : coeffs_)
    if (a.imag() != 0.0) return false;
  return true;
}

FourierSeries FourierSeries::scaled(double lambda) const {
  std::vector<cplx> c(coeffs_);
  std::vector<double> e(errors_);
  for (std::size_t n = 0; n < c.size(); ++n) {
    c[n] *= lambda;
    e[n] *= std::fabs(lambda);
  }
  return FourierSeries(level_, weight_, std::move(c), std::move(e));
}

FourierSeries FourierSeries::truncated(i64 N) const {
  if (N < 1 || N > degree()) throw InvalidArgument("FourierSeries::truncated: N out of range");
  return FourierSeries(level_, weight_, {coeffs_.begin(), coeffs_.begin() + N + 1},
                       {errors_.begin(), errors_.begin() + N + 1});
}

void FourierSeries::require_weight2_cusp_form(const char* who) const {
  if (weight_ != 2)
    throw InvalidArgument(std::string(who) + ": h must have weight 2, got " + std::to_string(weight_));
  if (!is_cusp_form())
    throw InvalidArgument(std::string(who) + ": h must be a cusp form (a_0 = 0 exactly)");
}

std::vector<i64> eta_quotient_coefficients(const std::vector<std::pair<int, int>>& factors, i64 N) {
  if (N < 0) throw InvalidArgument("eta_quotient_coefficients: N must be >= 0");
  i64 weight24 = 0;
  for (auto [m, e] : factors) {
    if (m < 1) throw InvalidArgument("eta_quotient_coefficients: eta(m tau) needs m >= 1");
    weight24 += static_cast<i64>(m) * e;
  }
  if (weight24 % 24 != 0)
    throw InvalidArgument("eta_quotient_coefficients: q-order sum m e / 24 is not an integer");
  // Pentagonal number theorem: prod (1 - q^n) = sum_k (-1)^k q^{k(3k-1)/2}.
  std::vector<std::pair<i64, int>> pent;
  pent.push_back({0, 1});
  for (i64 k = 1;; ++k) {
    i64 g1 = k * (3 * k - 1) / 2, g2 = k * (3 * k + 1) / 2;
    if (g1 > N) break;
    int s = k % 2 ? -1 : 1;
    pent.push_back({g1, s});
    if (g2 <= N) pent.push_back({g2, s});
  }
  auto narrow = [](__int128 v) {
    if (v > INT64_MAX || v < INT64_MIN) throw InvalidArgument("eta_quotient_coefficients: overflow");
    return static_cast<i64>(v);
  };
  std::vector<i64> f(N + 1, 0);
  f[0] = 1;
  for (auto [m, e] : factors) {
    for (int rep = 0; rep < std::abs(e); ++rep) {
      std::vector<i64> g(N + 1, 0);
      if (e > 0) {
        for (i64 n = 0; n <= N; ++n) {
          __int128 acc = 0;
          for (auto [p, s] : pent) {
            i64 off = p * m;
            if (off > n) break;
            acc += static_cast<__int128>(s) * f[n - off];
          }
          g[n] = narrow(acc);
        }
      } else {
        for (i64 n = 0; n <= N; ++n) {
          __int128 acc = f[n];
          for (std::size_t j = 1; j < pent.size(); ++j) {
            i64 off = pent[j].first * m;
            if (off > n) break;
            acc -= static_cast<__int128>(pent[j].second) * g[n - off];
          }
          g[n] = narrow(acc);
        }
      }
      f.swap(g);
    }
  }
  return f;
}

FourierSeries eta_product_weight2(i64 l, i64 N) {
  if (N < 1) throw InvalidArgument("eta_product_weight2: N must be >= 1");
  std::vector<std::pair<int, int>> factors;
  if (l == 11)
    factors = {{1, 2}, {11, 2}};
  else if (l == 14)
    factors = {{1, 1}, {2, 1}, {7, 1}, {14, 1}};
  else if (l == 15)
    factors = {{1, 1}, {3, 1}, {5, 1}, {15, 1}};
  else
    throw UnsupportedLevel("eta_product_weight2: unsupported level " + std::to_string(l) +
                           " (supported: 11, 14, 15)");
  std::vector<i64> e = eta_quotient_coefficients(factors, N - 1);
  std::vector<cplx> a(N + 1, 0.0);
  for (i64 n = 1; n <= N; ++n) a[n] = static_cast<double>(e[n - 1]);
  return FourierSeries(l, 2, std::move(a));
}

FourierSeries zero_form(i64 l, i64 N, int weight) {
  return FourierSeries(l, weight, std::vector<cplx>(std::max<i64>(N, 1) + 1, 0.0));
}

double hecke_constant(const FourierSeries& h) {
  double C = 0;
  for (i64 n = 1; n <= h.degree(); ++n) C = std::max(C, (std::abs(h[n]) + h.error_bounds()[n]) / n);
  return C;
}

CuspRational::CuspRational(i64 c, i64 d, i64 l) : c_(c), d_(d) {
  if (l < 1) throw InvalidArgument("CuspRational: level must be >= 1");
  if (mod(c, l) != 0) throw InvalidArgument("CuspRational: c must be divisible by the level");
  if (c != 0 && gcd(c, d) != 1) throw InvalidArgument("CuspRational: gcd(c, d) must be 1");
}

namespace {

double h_tail(double C, i64 N, double y) {
  return C / (2 * kPi) * std::exp(-2 * kPi * (N + 1) * y) / (-std::expm1(-2 * kPi * y));
}

// Smallest N with h_tail(C, N, y) <= target.
i64 h_terms(double C, double y, double target) {
  if (C == 0) return 0;
  double t = std::log(C / (2 * kPi * target * (-std::expm1(-2 * kPi * y)))) / (2 * kPi * y) - 1;
  if (!(t < 9e18)) return INT64_MAX;
  return std::max<i64>(1, static_cast<i64>(std::ceil(t)));
}

i64 h_terms_checked(const FourierSeries& h, double C, double y, double target, i64 cap, const char* who) {
  i64 N = h_terms(C, y, target);
  i64 avail = std::min<i64>(h.degree(), cap);
  if (N > avail)
    throw PrecisionUnreachable(std::string(who) + ": Im tau = " + fmt_g(y) + " needs " +
                                   (N == INT64_MAX ? std::string("too many") : std::to_string(N)) +
                                   " coefficients, " + std::to_string(avail) + " available",
                               h_tail(C, avail, y));
  return N;
}

}  // namespace

Estimate H_upper(const FourierSeries& h, HalfPlanePoint tau, const PrecisionBudget& budget) {
  budget.validate();
  h.require_weight2_cusp_form("H_upper");
  const double C = hecke_constant(h);
  if (C == 0) return {0.0, 0.0};
  const i64 N = h_terms_checked(h, C, tau.y, budget.target_abs_error / 2, budget.max_q_terms, "H_upper");
  const double x = tau.x - std::floor(tau.x);
  CompensatedComplexSum s;
  double rounding = 0, coeff_err = 0;
  for (i64 n = 1; n <= N; ++n) {
    double r = std::exp(-2 * kPi * n * tau.y) / (2 * kPi * n);
    double ph = std::fmod(n * x, 1.0);
    cplx term = h[n] * std::polar(r, 2 * kPi * ph) / cplx(0, 1);
    s.add(term);
    rounding += std::abs(term) * (8 + 2 * kPi * n * (x + 1)) * kEps;
    coeff_err += h.error_bounds()[n] * r;
  }
  return {s.value(), h_tail(C, N, tau.y) + coeff_err + rounding};
}

Estimate H_cusp_via(const FourierSeries& h, const GroupElement& gamma, const PrecisionBudget& budget) {
  h.require_weight2_cusp_form("H_cusp");
  if (!gamma.in_gamma0(h.level()))
    throw InvalidArgument("H_cusp: completion " + gamma.str() + " is not in Gamma0(" +
                          std::to_string(h.level()) + ")");
  if (gamma.c() == 0) return {0.0, 0.0};
  const GroupElement g = gamma.c() < 0 ? -gamma : gamma;
  const double c = static_cast<double>(g.c());
  const cplx tau0(-static_cast<double>(g.d()) / c, 1.0 / c);
  const cplx tau1 = g.act(tau0);
  PrecisionBudget half = budget.with_target(budget.target_abs_error / 2);
  Estimate e0 = H_upper(h, HalfPlanePoint(tau0.real(), tau0.imag()), half);
  Estimate e1 = H_upper(h, HalfPlanePoint::from(tau1), half);
  return {e0.value - e1.value, e0.error_bound + e1.error_bound};
}

Estimate H_cusp(const FourierSeries& h, const CuspRational& r, const PrecisionBudget& budget) {
  if (r.c() == 0) return {0.0, 0.0};
  return H_cusp_via(h, GroupElement::from_bottom_row(r.c(), r.d()), budget);
}

cplx twist_character(const FourierSeries& h, const GroupElement& gamma, const PrecisionBudget& budget) {
  if (!gamma.in_gamma0(h.level()))
    throw InvalidArgument("twist_character: " + gamma.str() + " is not in Gamma0(" +
                          std::to_string(h.level()) + ")");
  if (gamma.c() == 0) return 1.0;
  double re = H_cusp(h, CuspRational(gamma.c(), gamma.d(), h.level()), budget).value.real();
  cplx z = std::polar(1.0, 2 * kPi * (re - std::floor(re)));
  return z / std::abs(z);
}

PeriodData period_data(const FourierSeries& h, i64 l, const PrecisionBudget& budget) {
  h.require_weight2_cusp_form("period_data");
  if (h.level() != l) throw InvalidArgument("period_data: form level differs from l");
  PeriodData p;
  p.level = l;
  p.generators = gamma0_generators(l);
  for (const auto& g : p.generators) {
    if (g.c() == 0) {
      p.re_periods.push_back(0.0);
      p.error_bounds.push_back(0.0);
      continue;
    }
    Estimate e = H_cusp(h, CuspRational(g.c(), g.d(), l), budget);
    p.re_periods.push_back(e.value.real());
    p.error_bounds.push_back(e.error_bound);
  }
  return p;
}

namespace {

// In-place FFTW plans for power-of-two lengths, created once per length.
struct Pow2Plans {
  std::mutex mu;
  std::map<i64, std::pair<fftw_plan, fftw_plan>> plans;
  std::pair<fftw_plan, fftw_plan> get(i64 L) {
    std::lock_guard<std::mutex> lock(mu);
    auto it = plans.find(L);
    if (it != plans.end()) return it->second;
    fftw_complex* tmp = fftw_alloc_complex(L);
    fftw_plan f = fftw_plan_dft_1d(static_cast<int>(L), tmp, tmp, FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_plan b = fftw_plan_dft_1d(static_cast<int>(L), tmp, tmp, FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_free(tmp);
    return plans[L] = {f, b};
  }
};

Pow2Plans& pow2_plans() {
  static Pow2Plans p;
  return p;
}

struct FftwBuffer {
  fftw_complex* p;
  explicit FftwBuffer(i64 n) : p(fftw_alloc_complex(n)) {
    if (!p) throw std::bad_alloc();
    for (i64 i = 0; i < n; ++i) p[i][0] = p[i][1] = 0.0;
  }
  ~FftwBuffer() { fftw_free(p); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
};

// out[j] = sum_n x[n] e^{2 pi i n j / c} (chirp-z, cyclic convolution of length L >= 2c - 1).
// Returns a bound on the rounding error of each output.
double chirp_dft(const std::vector<cplx>& x, std::vector<cplx>& out) {
  const i64 c = static_cast<i64>(x.size());
  i64 L = 1;
  while (L < 2 * c - 1) L *= 2;
  auto [fwd, bwd] = pow2_plans().get(L);
  std::vector<cplx> w(c);
  for (i64 n = 0; n < c; ++n) {
    const i64 e = (n * n) % (2 * c);
    w[n] = std::polar(1.0, kPi * static_cast<double>(e) / static_cast<double>(c));
  }
  FftwBuffer a(L), b(L);
  double norm2 = 0, norm1 = 0;
  for (i64 n = 0; n < c; ++n) {
    const cplx v = x[n] * w[n];
    a.p[n][0] = v.real();
    a.p[n][1] = v.imag();
    norm2 += std::norm(x[n]);
    norm1 += std::abs(x[n]);
  }
  b.p[0][0] = 1.0;
  for (i64 m = 1; m < c; ++m) {
    b.p[m][0] = b.p[L - m][0] = w[m].real();
    b.p[m][1] = b.p[L - m][1] = -w[m].imag();
  }
  fftw_execute_dft(fwd, a.p, a.p);
  fftw_execute_dft(fwd, b.p, b.p);
  for (i64 j = 0; j < L; ++j) {
    const double re = a.p[j][0] * b.p[j][0] - a.p[j][1] * b.p[j][1];
    const double im = a.p[j][0] * b.p[j][1] + a.p[j][1] * b.p[j][0];
    a.p[j][0] = re;
    a.p[j][1] = im;
  }
  fftw_execute_dft(bwd, a.p, a.p);
  out.resize(c);
  const double inv = 1.0 / static_cast<double>(L);
  for (i64 j = 0; j < c; ++j) out[j] = w[j] * cplx(a.p[j][0] * inv, a.p[j][1] * inv);
  const double lg = std::log2(static_cast<double>(L));
  return kEps * ((12 * lg + 16) * std::sqrt(static_cast<double>(L) * norm2) + 16 * norm1);
}

}  // namespace

PeriodTable period_table(const FourierSeries& h, i64 c, double target, i64 max_q_terms, double hecke) {
  h.require_weight2_cusp_form("period_table");
  if (c < 1) throw InvalidArgument("period_table: denominator must be positive");
  PeriodTable t;
  t.denominator = c;
  t.re_h.assign(c, std::numeric_limits<double>::quiet_NaN());
  const double C = hecke < 0 ? hecke_constant(h) : hecke;
  const double y = 1.0 / static_cast<double>(c);
  if (C == 0) {
    for (i64 d = 0; d < c; ++d)
      if (gcd(d, c) == 1) t.re_h[d] = 0.0;
    return t;
  }
  const i64 N = h_terms_checked(h, C, y, target / 4, max_q_terms, "period_table");
  std::vector<cplx> folded(c, 0.0);
  double mag = 0, coeff_err = 0;
  const double step = std::exp(-2 * kPi * y);
  const auto& err = h.error_bounds();
  double e = 1;
  for (i64 n = 1, j = 1; n <= N; ++n, ++j) {
    e = (n & 127) == 0 ? std::exp(-2 * kPi * static_cast<double>(n) * y) : e * step;
    const double r = e / (2 * kPi * static_cast<double>(n));
    const cplx a = h[n];
    if (j == c) j = 0;
    folded[j] += cplx(a.imag() * r, -a.real() * r);
    mag += (std::fabs(a.real()) + std::fabs(a.imag())) * r;
    coeff_err += err[n] * r;
  }
  std::vector<cplx> vals;
  const double fft_err = chirp_dft(folded, vals);
  // vals[j] = H((j + i) / c); Re H(-d/c) = Re(H((-d + i)/c) - H((d^-1 + i)/c)).
  for (i64 d = 0; d < c; ++d) {
    i64 x, yy;
    if (ext_gcd(d, c, x, yy) != 1) continue;
    const i64 j0 = d == 0 ? 0 : c - d, j1 = mod(x, c);
    t.re_h[d] = vals[j0].real() - vals[j1].real();
  }
  t.error_bound = 2 * (h_tail(C, N, y) + coeff_err + fft_err) + 2 * kEps * 136 * mag;
  return t;
}

Twist::Twist(FourierSeries h, double period_target, i64 max_q_terms)
    : h_(std::move(h)), zero_(h_.is_zero()), target_(period_target), max_q_(max_q_terms), hecke_(0) {
  h_.require_weight2_cusp_form("Twist");
  if (!(period_target > 0) || max_q_terms < 1)
    throw InvalidArgument("Twist: period target and term cap must be positive");
  hecke_ = hecke_constant(h_);
}

std::shared_ptr<const PeriodTable> Twist::table(i64 c) const {
  {
    std::shared_lock lock(mu_);
    auto it = cache_.find(c);
    if (it != cache_.end()) return it->second;
  }
  if (mod(c, level()) != 0)
    throw InvalidArgument("Twist: denominator " + std::to_string(c) + " is not a multiple of the level");
  auto t = std::make_shared<const PeriodTable>(period_table(h_, c, target_, max_q_, hecke_));
  std::unique_lock lock(mu_);
  auto [it, fresh] = cache_.emplace(c, t);
  if (fresh) max_err_ = std::max(max_err_, t->error_bound);
  return it->second;
}

double Twist::re_period(i64 c, i64 d) const {
  if (c == 0 || zero_) return 0.0;
  if (c < 0) {
    c = -c;
    d = -d;
  }
  i64 g = gcd(c, d);
  c /= g;
  d /= g;
  return table(c)->re_h[mod(d, c)];
}

double Twist::period_error() const {
  std::shared_lock lock(mu_);
  return max_err_;
}

}  // namespace teis
