#include "teis/eisenstein.hpp"

#include <atomic>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>
#include <unordered_map>

#include "teis/errors.hpp"
#include "teis/summation.hpp"

namespace teis {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// e^{2 pi i num / den} with the numerator reduced exactly.
cplx unit_root(i64 num, i64 den) {
  return std::polar(1.0, 2 * kPi * static_cast<double>(mod(num, den)) / static_cast<double>(den));
}

cplx ipow(cplx z, int k) {
  cplx r = 1.0;
  for (int j = 0; j < k; ++j) r *= z;
  return r;
}

// 1 / (2 pi i)^k.
cplx inv_two_pi_i_pow(int k) { return ipow(cplx(0, -1), k) * std::pow(2 * kPi, -k); }

double factorial(int n) {
  double f = 1;
  for (int j = 2; j <= n; ++j) f *= j;
  return f;
}

double zeta(int s) { return residue_class_zeta(s, 0, 1, 1e-17).value.real(); }

void require_weight(int k, const char* who) {
  if (k < 3)
    throw InvalidArgument(std::string(who) + ": weight k = " + std::to_string(k) +
                          " is unsupported; the lattice sum converges absolutely only for k >= 3");
}

}  // namespace

EisensteinSpec::EisensteinSpec(i64 level, int weight, i64 twist_index, std::shared_ptr<const Twist> twist)
    : level_(level), weight_(weight), index_(0), twist_(std::move(twist)) {
  if (level_ < 1) throw InvalidArgument("EisensteinSpec: level must be >= 1");
  require_weight(weight_, "EisensteinSpec");
  if (!twist_) throw InvalidArgument("EisensteinSpec: twist form is required (use the zero form)");
  if (twist_->level() != level_)
    throw InvalidArgument("EisensteinSpec: twist form has level " + std::to_string(twist_->level()) +
                          ", series has level " + std::to_string(level_));
  index_ = mod(twist_index, level_);
}

double lattice_tail_bound(i64 l, int k, HalfPlanePoint tau, double R) {
  cplx b1 = 1.0, b2 = static_cast<double>(l) * tau.z();
  for (int it = 0; it < 200; ++it) {
    if (std::norm(b2) < std::norm(b1)) std::swap(b1, b2);
    double t = std::round((b2 * std::conj(b1)).real() / std::norm(b1));
    if (t == 0) break;
    b2 -= t * b1;
  }
  const double delta = (std::abs(b1) + std::abs(b2)) / 2;
  const double area = static_cast<double>(l) * tau.y;
  if (R <= 2 * delta) return std::numeric_limits<double>::infinity();
  const double s = R - 2 * delta;
  return 2 * kPi / area * (std::pow(s, 2 - k) / (k - 2) + delta * std::pow(s, 1 - k) / (k - 1));
}

LatticeSums lattice_sums(i64 l, int k, const Twist& twist, HalfPlanePoint tau, bool coprime_only,
                         const PrecisionBudget& budget, double tail_weight) {
  budget.validate();
  require_weight(k, "lattice_sums");
  if (twist.level() != l) throw InvalidArgument("lattice_sums: twist level differs from l");
  const double target = budget.target_abs_error / 2;
  if (!(tail_weight >= 0 && tail_weight <= 1)) throw InvalidArgument("lattice_sums: tail weight must lie in [0, 1]");
  auto tail = [&](double R) { return tail_weight == 0 ? 0.0 : tail_weight * lattice_tail_bound(l, k, tau, R); };
  const double cap = static_cast<double>(budget.max_lattice_radius);
  if (tail(cap) > target)
    throw PrecisionUnreachable("lattice sum: radius above max_lattice_radius = " +
                                   std::to_string(budget.max_lattice_radius) + " needed at tau = (" +
                                   fmt_g(tau.x) + ", " + fmt_g(tau.y) + ")",
                               tail(cap));
  double lo = 1, hi = cap;
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    (tail(mid) > target ? lo : hi) = mid;
  }
  const double R = tail(lo) <= target ? lo : hi;

  std::vector<CompensatedComplexSum> acc(l);
  std::vector<char> unit(l);
  for (i64 r = 0; r < l; ++r) unit[r] = gcd(r, l) == 1;
  const double sign = k % 2 ? -1.0 : 1.0;
  std::unordered_map<i64, std::shared_ptr<const PeriodTable>> tables;
  double mag = 0, table_err = 0;
  i64 terms = 0;
  auto add = [&](i64 d, cplx t) {
    acc[mod(d, l)].add(t);
    acc[mod(-d, l)].add(sign * t);
    mag += 2 * std::abs(t);
    terms += 2;
  };
  for (i64 d = 1; d <= static_cast<i64>(R); ++d) {
    if (coprime_only ? d != 1 : !unit[d % l]) continue;
    add(d, std::pow(static_cast<double>(d), -k));
  }
  const i64 c0max = static_cast<i64>(std::floor(R / (static_cast<double>(l) * tau.y)));
  for (i64 c0 = 1; c0 <= c0max; ++c0) {
    const i64 c = l * c0;
    const double cx = static_cast<double>(c) * tau.x, cy = static_cast<double>(c) * tau.y;
    const double half = std::sqrt(std::max(0.0, R * R - cy * cy));
    const i64 d_lo = static_cast<i64>(std::ceil(-cx - half)), d_hi = static_cast<i64>(std::floor(-cx + half));
    for (i64 d = d_lo; d <= d_hi; ++d) {
      if (!unit[mod(d, l)]) continue;
      i64 g = 1;
      if (coprime_only || !twist.is_zero()) g = gcd(c, d);
      if (coprime_only && g != 1) continue;
      const cplx w = 1.0 / cplx(cx + static_cast<double>(d), cy);
      cplx t = ipow(w, k);
      if (!twist.is_zero()) {
        const i64 cr = c / g;
        auto it = tables.find(cr);
        if (it == tables.end()) {
          it = tables.emplace(cr, twist.table(cr)).first;
          table_err = std::max(table_err, it->second->error_bound);
        }
        double re = it->second->re_h[mod(d / g, cr)];
        t *= std::polar(1.0, 2 * kPi * (re - std::floor(re)));
      }
      add(d, t);
    }
  }
  LatticeSums out;
  out.by_residue.resize(l);
  for (i64 r = 0; r < l; ++r) out.by_residue[r] = acc[r].value();
  out.radius = R;
  out.terms = terms;
  out.error_bound = tail(R) + 2 * kPi * table_err * mag + 4 * (k + 4) * kEps * mag;
  return out;
}

Estimate eval_direct(const EisensteinSpec& spec, HalfPlanePoint tau, const PrecisionBudget& budget) {
  const i64 l = spec.level();
  // Terms at w and -w enter with e(-r i / l) + (-1)^k e(r i / l), at most twice this weight.
  double weight = 0;
  for (i64 r = 0; r < l; ++r) {
    if (gcd(r, l) != 1) continue;
    const cplx f = unit_root(-r * spec.twist_index(), l) + (spec.weight() % 2 ? -1.0 : 1.0) * unit_root(r * spec.twist_index(), l);
    weight = std::max(weight, std::abs(f) / 2);
  }
  if (weight < 1e-12) weight = 0;
  LatticeSums s = lattice_sums(l, spec.weight(), spec.twist(), tau, false, budget, std::min(weight, 1.0));
  CompensatedComplexSum v;
  for (i64 r = 0; r < l; ++r) v.add(unit_root(-r * spec.twist_index(), l) * s.by_residue[r]);
  return {v.value(), s.error_bound};
}

Estimate eval_hat(i64 level, int k, const DirichletCharacter& chi, const Twist& twist, HalfPlanePoint tau,
                  const PrecisionBudget& budget) {
  if (chi.modulus() != level) throw InvalidArgument("eval_hat: character modulus differs from level");
  LatticeSums s = lattice_sums(level, k, twist, tau, true, budget);
  CompensatedComplexSum v;
  for (i64 r = 0; r < level; ++r) v.add(chi(r) * s.by_residue[r]);
  return {v.value(), s.error_bound};
}

FourierSeries QExpansion::normalized() const { return FourierSeries(level, weight, coeffs, errors); }

FourierSeries QExpansion::raw() const {
  const double scale = std::pow(2 * kPi, weight);
  const cplx f = ipow(cplx(0, 1), weight) * scale;
  std::vector<cplx> c(coeffs.size());
  std::vector<double> e(errors.size());
  for (std::size_t m = 0; m < c.size(); ++m) {
    c[m] = coeffs[m] * f;
    e[m] = errors[m] * scale * (1 + 4 * kEps);
  }
  return FourierSeries(level, weight, std::move(c), std::move(e));
}

Estimate QExpansion::evaluate(HalfPlanePoint tau) const {
  const double scale = std::pow(2 * kPi, weight);
  const double x = std::exp(-2 * kPi * tau.y);
  CompensatedComplexSum s;
  double err = 0, mag = 0;
  const double frac = tau.x - std::floor(tau.x);
  for (i64 m = 0; m <= degree(); ++m) {
    const cplx q = std::polar(std::exp(-2 * kPi * m * tau.y), 2 * kPi * std::fmod(m * frac, 1.0));
    s.add(coeffs[m] * q);
    err += errors[m] * std::abs(q);
    mag += std::abs(coeffs[m] * q) * (4 + 2 * kPi * m) * kEps;
  }
  // sum_{m > M} m^{k-1} x^m: explicit terms while the ratio is >= 1/2, then a geometric bound.
  double tail = 0;
  for (i64 m = degree() + 1;; ++m) {
    const double term = std::pow(static_cast<double>(m), weight - 1) * std::pow(x, static_cast<double>(m));
    const double ratio = std::pow(1.0 + 1.0 / m, weight - 1) * x;
    if (ratio < 0.5) {
      tail += term / (1 - ratio);
      break;
    }
    tail += term;
    if (m > degree() + 10000000) {
      tail = std::numeric_limits<double>::infinity();
      break;
    }
  }
  const cplx f = ipow(cplx(0, 1), weight) * scale;
  return {s.value() * f, scale * (err + growth * tail + mag) * (1 + 8 * kEps)};
}

namespace {

struct ClassZetas {
  std::vector<double> z;  // residue class sums on units, 0 elsewhere
  double err = 0;         // sum of the per-class error bounds
  double total = 0;       // sum of z
};

ClassZetas class_zetas(i64 l, int k, double target) {
  ClassZetas cz;
  cz.z.assign(l, 0.0);
  for (i64 t = 0; t < l; ++t) {
    if (gcd(t, l) != 1) continue;
    Estimate e = residue_class_zeta(k, t, l, target / static_cast<double>(l));
    cz.z[t] = e.value.real();
    cz.err += e.error_bound;
    cz.total += cz.z[t];
  }
  return cz;
}

// w_i(t) = e^{-2 pi i t i / l} + (-1)^k e^{2 pi i t i / l}.
cplx w_index(i64 l, int k, i64 i, i64 t) {
  return unit_root(-t * i, l) + (k % 2 ? -1.0 : 1.0) * unit_root(t * i, l);
}

struct Chunk {
  std::vector<CompensatedComplexSum> acc;
  double table_err = 0;
};

}  // namespace

std::vector<QExpansion> fourier_coeffs_multi(i64 level, int k, const std::vector<i64>& indices,
                                             const Twist& twist, i64 M, const PrecisionBudget& budget,
                                             const FourierOptions& options) {
  budget.validate();
  require_weight(k, "fourier_coeffs");
  if (M < 0) throw InvalidArgument("fourier_coeffs: M must be >= 0");
  if (twist.level() != level) throw InvalidArgument("fourier_coeffs: twist level differs from series level");
  if (!options.targets.empty() && static_cast<i64>(options.targets.size()) != M + 1)
    throw InvalidArgument("fourier_coeffs: per-m targets must have M + 1 entries");
  const i64 l = level;
  const std::size_t nI = indices.size();
  std::vector<double> target(M + 1, budget.target_abs_error);
  if (!options.targets.empty()) target = options.targets;
  for (double t : target)
    if (!(t > 0)) throw InvalidArgument("fourier_coeffs: targets must be positive");
  double min_target = *std::min_element(target.begin(), target.end());

  const double zeta_km1 = zeta(k - 1);
  const double norm = std::pow(2 * kPi, -k);
  const cplx inv = inv_two_pi_i_pow(k);
  const ClassZetas cz = class_zetas(l, k, std::min(1e-18, min_target * 1e-3 / norm));
  const double w_bound = 2 * cz.total;
  const double w_err = 2 * cz.err;
  const double lfac = std::pow(static_cast<double>(l), 1 - k);
  const double kfac = factorial(k - 1);
  // |r_m| <= coef(m) * w_bound with coef(m) = m^{k-1} / (k-1)! * l^{1-k} zeta(k-1).
  auto coef = [&](i64 m) { return std::pow(static_cast<double>(m), k - 1) / kfac * lfac * zeta_km1; };

  std::vector<QExpansion> out(nI);
  for (std::size_t a = 0; a < nI; ++a) {
    auto& q = out[a];
    q.level = l;
    q.weight = k;
    q.twist_index = mod(indices[a], l);
    q.coeffs.assign(M + 1, 0.0);
    q.errors.assign(M + 1, 0.0);
    q.growth = w_bound * lfac * zeta_km1 / kfac;
    CompensatedComplexSum r0;
    for (i64 t = 0; t < l; ++t)
      if (cz.z[t] != 0) r0.add(cz.z[t] * w_index(l, k, q.twist_index, t));
    q.coeffs[0] = r0.value() * inv;
    q.errors[0] = norm * (2 * cz.err + 16 * kEps * cz.total) + 4 * kEps * std::abs(q.coeffs[0]);
  }
  if (M == 0) return out;

  const double sgn = k % 2 ? -1.0 : 1.0;
  std::vector<CompensatedComplexSum> acc(nI * (M + 1));
  std::vector<double> extra(M + 1, 0.0);

  if (twist.is_zero()) {
    // For c0 > M the d0-sum over a full period vanishes identically: no truncation error.
    for (i64 c0 = 1; c0 <= M; ++c0) {
      const i64 c = l * c0;
      std::vector<cplx> V(l * (M + 1), 0.0);
      for (i64 d0 = 0; d0 < c; ++d0) {
        if (gcd(d0, l) != 1) continue;
        const i64 r = d0 % l;
        for (i64 m = 1; m <= M; ++m) V[r * (M + 1) + m] += unit_root(m * d0, c);
      }
      const double ck = std::pow(static_cast<double>(c), -k);
      for (std::size_t a = 0; a < nI; ++a) {
        for (i64 m = 1; m <= M; ++m) {
          cplx S = 0;
          for (i64 r = 0; r < l; ++r)
            if (gcd(r, l) == 1) S += w_index(l, k, out[a].twist_index, r) * V[r * (M + 1) + m];
          acc[a * (M + 1) + m].add(S * ck);
        }
      }
    }
    for (i64 m = 1; m <= M; ++m) extra[m] = coef(m) * 2 * (4 + 2 * kPi * m) * static_cast<double>(M) * kEps;
  } else {
    const double fixed_per_coef = w_bound * 2 * kPi * twist.period_target() + w_err;
    i64 C0 = 1;
    double worst_need = 0;
    i64 worst_m = 1;
    for (i64 m = 1; m <= M; ++m) {
      const double room = target[m] / 2;
      if (coef(m) * fixed_per_coef > room)
        throw PrecisionUnreachable("fourier_coeffs: period accuracy limits coefficient m = " +
                                       std::to_string(m) + " to error " + fmt_g(coef(m) * fixed_per_coef),
                                   coef(m) * fixed_per_coef);
      const double lead = std::pow(static_cast<double>(m), k - 1) / kfac * w_bound * lfac / (k - 2);
      const double need = std::ceil(std::pow(lead / room, 1.0 / (k - 2)));
      if (need > worst_need) worst_need = need, worst_m = m;
    }
    if (worst_need > static_cast<double>(budget.max_c_terms)) {
      const double capped = static_cast<double>(budget.max_c_terms);
      const double achievable = std::pow(static_cast<double>(worst_m), k - 1) / kfac * w_bound * lfac / (k - 2) *
                                std::pow(capped, 2.0 - k);
      throw PrecisionUnreachable("fourier_coeffs: " + fmt_g(worst_need) + " denominators needed for m = " +
                                     std::to_string(worst_m) + ", max_c_terms = " +
                                     std::to_string(budget.max_c_terms) + "; achievable truncation error at m = " +
                                     std::to_string(worst_m) + " is " + fmt_g(achievable),
                                 achievable);
    }
    C0 = static_cast<i64>(worst_need);
    // W[a][r] = sum_{(g,l)=1} g^-k w_i(g r).
    std::vector<cplx> W(nI * l, 0.0);
    for (std::size_t a = 0; a < nI; ++a)
      for (i64 r = 0; r < l; ++r) {
        if (gcd(r, l) != 1) continue;
        CompensatedComplexSum s;
        for (i64 t = 0; t < l; ++t)
          if (cz.z[t] != 0) s.add(cz.z[t] * w_index(l, k, out[a].twist_index, t * r));
        W[a * l + r] = s.value();
      }
    const i64 chunk_size = 16;
    const i64 n_chunks = (C0 + chunk_size - 1) / chunk_size;
    std::vector<Chunk> chunks(n_chunks);
    std::atomic<i64> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mu;
    auto work = [&] {
      std::vector<cplx> U(l * (M + 1));
      for (;;) {
        const i64 ci = next.fetch_add(1);
        if (ci >= n_chunks || failed) return;
        Chunk& ch = chunks[ci];
        ch.acc.assign(nI * (M + 1), {});
        try {
          for (i64 c0 = ci * chunk_size + 1; c0 <= std::min(C0, (ci + 1) * chunk_size); ++c0) {
            const i64 cp = l * c0;
            PeriodTable tab = period_table(twist.form(), cp, twist.period_target(), twist.max_q_terms(), twist.hecke());
            ch.table_err = std::max(ch.table_err, tab.error_bound);
            std::fill(U.begin(), U.end(), 0.0);
            for (i64 d = 0; d < cp; ++d) {
              const double re = tab.re_h[d];
              if (std::isnan(re)) continue;
              const double zr = std::cos(2 * kPi * static_cast<double>(d) / static_cast<double>(cp));
              const double zi = std::sin(2 * kPi * static_cast<double>(d) / static_cast<double>(cp));
              const double ph = 2 * kPi * (re - std::floor(re));
              double pr = std::cos(ph), pi = std::sin(ph);
              cplx* u = &U[(d % l) * (M + 1)];
              for (i64 m = 1; m <= M; ++m) {
                const double t = pr * zr - pi * zi;
                pi = pr * zi + pi * zr;
                pr = t;
                u[m] += cplx(pr, pi);
              }
            }
            const double ck = std::pow(static_cast<double>(cp), -k);
            for (std::size_t a = 0; a < nI; ++a)
              for (i64 m = 1; m <= M; ++m) {
                cplx S = 0;
                for (i64 r = 0; r < l; ++r) S += W[a * l + r] * U[r * (M + 1) + m];
                ch.acc[a * (M + 1) + m].add(S * ck);
              }
          }
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
          failed = true;
          return;
        }
      }
    };
    const int nthreads = std::max(1, options.threads);
    if (nthreads == 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < nthreads; ++t) pool.emplace_back(work);
      for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);
    double table_err = 0;
    for (const auto& ch : chunks) {
      table_err = std::max(table_err, ch.table_err);
      for (std::size_t j = 0; j < acc.size(); ++j) acc[j].add(ch.acc[j].value());
    }
    for (i64 m = 1; m <= M; ++m) {
      const double tail = std::pow(static_cast<double>(m), k - 1) / kfac * w_bound * lfac / (k - 2) *
                          std::pow(static_cast<double>(C0), 2.0 - k);
      extra[m] = tail + coef(m) * (w_bound * 2 * kPi * table_err + w_err +
                                   w_bound * 8 * (static_cast<double>(m) + 16) * kEps);
    }
  }

  for (std::size_t a = 0; a < nI; ++a)
    for (i64 m = 1; m <= M; ++m) {
      const double f = sgn * std::pow(static_cast<double>(m), k - 1) / kfac;
      out[a].coeffs[m] = f * acc[a * (M + 1) + m].value();
      out[a].errors[m] = extra[m] + 8 * kEps * std::abs(out[a].coeffs[m]);
    }
  return out;
}

QExpansion fourier_coeffs(const EisensteinSpec& spec, i64 M, const PrecisionBudget& budget) {
  return fourier_coeffs_multi(spec.level(), spec.weight(), {spec.twist_index()}, spec.twist(), M, budget)[0];
}

namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

Rational to_rational(const cpp_rational& x, const char* who) {
  cpp_int n = boost::multiprecision::numerator(x), d = boost::multiprecision::denominator(x);
  const cpp_int lim = cpp_int(std::numeric_limits<i64>::max());
  if (abs(n) > lim || d > lim) throw InvalidArgument(std::string(who) + ": value exceeds 64-bit rational range");
  return Rational(static_cast<i64>(n), static_cast<i64>(d));
}

std::vector<cpp_rational> bernoulli_numbers(int n) {
  std::vector<cpp_rational> B(n + 1);
  B[0] = 1;
  for (int m = 1; m <= n; ++m) {
    cpp_rational s = 0;
    cpp_int binom = 1;  // C(m+1, j)
    for (int j = 0; j < m; ++j) {
      s += cpp_rational(binom) * B[j];
      binom = binom * (m + 1 - j) / (j + 1);
    }
    B[m] = -s / (m + 1);
  }
  return B;
}

}  // namespace

i64 untwisted_exact(i64 l, int k, i64 i, i64 m) {
  require_weight(k, "untwisted_exact");
  if (l < 1 || m < 1) throw InvalidArgument("untwisted_exact: need l >= 1 and m >= 1");
  __int128 s = 0;
  for (i64 r : divisors(m)) {
    __int128 p = 1;
    for (int j = 0; j < k - 1; ++j) p *= r;
    s += p * (ramanujan_sum(l, i - r) + (k % 2 ? -1 : 1) * ramanujan_sum(l, i + r));
  }
  if (s > INT64_MAX || s < INT64_MIN) throw InvalidArgument("untwisted_exact: overflow");
  return static_cast<i64>(s);
}

Rational untwisted_normalized(i64 l, int k, i64 i, i64 m) {
  require_weight(k, "untwisted_normalized");
  if (l < 1 || m < 0) throw InvalidArgument("untwisted_normalized: need l >= 1 and m >= 0");
  cpp_int kfac = 1;
  for (int j = 2; j <= k; ++j) kfac *= j;
  if (m >= 1) {
    cpp_int den = kfac / k;
    for (int j = 0; j < k; ++j) den *= l;
    cpp_rational v(cpp_int(untwisted_exact(l, k, i, m)), den);
    if (k % 2) v = -v;
    return to_rational(v, "untwisted_normalized");
  }
  // -(1/(l k!)) sum_a c_l(i + a) B_k(a / l).
  auto B = bernoulli_numbers(k);
  cpp_rational total = 0;
  for (i64 a = 0; a < l; ++a) {
    cpp_rational x(a, l), bk = 0, xp = 1;
    cpp_int binom = 1;
    std::vector<cpp_rational> pw(k + 1);
    for (int j = 0; j <= k; ++j) {
      pw[j] = xp;
      xp *= x;
    }
    for (int j = 0; j <= k; ++j) {
      bk += cpp_rational(binom) * B[j] * pw[k - j];
      binom = binom * (k - j) / (j + 1);
    }
    total += cpp_rational(ramanujan_sum(l, i + a)) * bk;
  }
  return to_rational(-total / cpp_rational(cpp_int(l) * kfac), "untwisted_normalized");
}

Residual dedekind_check(i64 level, int k, i64 i, const Twist& twist, HalfPlanePoint tau,
                        const PrecisionBudget& budget) {
  const i64 l = level;
  const EisensteinSpec spec(l, k, i, std::shared_ptr<const Twist>(&twist, [](const Twist*) {}));
  Estimate lhs = eval_direct(spec, tau, budget);
  LatticeSums hat = lattice_sums(l, k, twist, tau, true, budget);
  CompensatedComplexSum rhs;
  double err = lhs.error_bound;
  for (const auto& chi : characters_mod(l)) {
    CompensatedComplexSum e;
    for (i64 r = 0; r < l; ++r) e.add(chi(r) * hat.by_residue[r]);
    const Estimate L = dirichlet_L(chi, k, budget.with_target(budget.target_abs_error / 8));
    const cplx g = gauss_coefficient(i, chi);
    rhs.add(g * L.value * e.value());
    err += std::abs(g) * (std::abs(L.value) * hat.error_bound + L.error_bound * (std::abs(e.value()) + hat.error_bound));
  }
  return {std::abs(lhs.value - rhs.value()), err};
}

Residual modularity_residual(const EisensteinSpec& spec, const GroupElement& gamma, HalfPlanePoint tau,
                             const PrecisionBudget& budget) {
  const i64 l = spec.level();
  if (!gamma.in_gamma0(l)) throw InvalidArgument("modularity_residual: gamma is not in Gamma0(l)");
  const HalfPlanePoint gt = HalfPlanePoint::from(gamma.act(tau.z()));
  Estimate lhs = eval_direct(spec, gt, budget);
  Estimate rhs = eval_direct(spec.with_index(gamma.a() * spec.twist_index()), tau, budget);
  double re = 0, re_err = 0;
  if (gamma.c() != 0 && !spec.twist().is_zero()) {
    Estimate h = H_cusp(spec.twist().form(), CuspRational(gamma.c(), gamma.d(), l), budget.with_target(1e-12));
    re = h.value.real();
    re_err = h.error_bound;
  }
  const cplx j = ipow(gamma.automorphy(tau.z()), spec.weight());
  const cplx r = j * std::polar(1.0, -2 * kPi * re) * rhs.value;
  return {std::abs(lhs.value - r),
          lhs.error_bound + std::abs(j) * (rhs.error_bound + 2 * kPi * re_err * std::abs(rhs.value))};
}

Residual modularity_residual(const std::vector<QExpansion>& by_index, i64 i, const GroupElement& gamma,
                             HalfPlanePoint tau, const FourierSeries& h, const PrecisionBudget& budget) {
  if (by_index.empty()) throw InvalidArgument("modularity_residual: no expansions supplied");
  const i64 l = by_index[0].level;
  if (static_cast<i64>(by_index.size()) != l) throw InvalidArgument("modularity_residual: need all l indices");
  for (i64 j = 0; j < l; ++j)
    if (by_index[j].twist_index != j) throw InvalidArgument("modularity_residual: expansions out of order");
  if (!gamma.in_gamma0(l)) throw InvalidArgument("modularity_residual: gamma is not in Gamma0(l)");
  const HalfPlanePoint gt = HalfPlanePoint::from(gamma.act(tau.z()));
  Estimate lhs = by_index[mod(i, l)].evaluate(gt);
  Estimate rhs = by_index[mod(gamma.a() * i, l)].evaluate(tau);
  double re = 0, re_err = 0;
  if (gamma.c() != 0 && !h.is_zero()) {
    Estimate e = H_cusp(h, CuspRational(gamma.c(), gamma.d(), l), budget.with_target(1e-12));
    re = e.value.real();
    re_err = e.error_bound;
  }
  const cplx j = ipow(gamma.automorphy(tau.z()), by_index[0].weight);
  const cplx r = j * std::polar(1.0, -2 * kPi * re) * rhs.value;
  return {std::abs(lhs.value - r),
          lhs.error_bound + std::abs(j) * (rhs.error_bound + 2 * kPi * re_err * std::abs(rhs.value))};
}

Residual reality_check(const EisensteinSpec& spec, i64 M, const PrecisionBudget& budget) {
  QExpansion q = fourier_coeffs(spec, M, budget);
  Residual r;
  for (i64 m = 0; m <= M; ++m) {
    r.residual = std::max(r.residual, std::fabs(q.coeffs[m].imag()));
    r.error_bound = std::max(r.error_bound, q.errors[m]);
  }
  return r;
}

}  // namespace teis
