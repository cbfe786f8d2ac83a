#include "teis/arith.hpp"

#include <cmath>
#include <numbers>

#include "teis/errors.hpp"
#include "teis/summation.hpp"

namespace teis {

void PrecisionBudget::validate() const {
  if (!(std::isfinite(target_abs_error) && target_abs_error > 0))
    throw InvalidArgument("precision budget: target_abs_error must be positive and finite");
  if (max_lattice_radius <= 0 || max_c_terms <= 0 || max_q_terms <= 0)
    throw InvalidArgument("precision budget: truncation caps must be positive");
}

i64 gcd(i64 a, i64 b) {
  a = a < 0 ? -a : a;
  b = b < 0 ? -b : b;
  while (b != 0) {
    i64 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

i64 mod(i64 a, i64 m) {
  i64 r = a % m;
  return r < 0 ? r + m : r;
}

i64 ext_gcd(i64 a, i64 b, i64& x, i64& y) {
  i64 x0 = 1, y0 = 0, x1 = 0, y1 = 1;
  while (b != 0) {
    i64 q = a / b;
    i64 t = a - q * b;
    a = b;
    b = t;
    t = x0 - q * x1;
    x0 = x1;
    x1 = t;
    t = y0 - q * y1;
    y0 = y1;
    y1 = t;
  }
  if (a < 0) {
    a = -a;
    x0 = -x0;
    y0 = -y0;
  }
  x = x0;
  y = y0;
  return a;
}

i64 mod_inverse(i64 a, i64 m) {
  if (m == 1) return 0;
  i64 x, y;
  if (ext_gcd(mod(a, m), m, x, y) != 1)
    throw InvalidArgument("mod_inverse: " + std::to_string(a) + " is not a unit mod " +
                          std::to_string(m));
  return mod(x, m);
}

std::vector<i64> prime_factors(i64 n) {
  std::vector<i64> ps;
  if (n < 0) n = -n;
  for (i64 p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      ps.push_back(p);
      while (n % p == 0) n /= p;
    }
  }
  if (n > 1) ps.push_back(n);
  return ps;
}

std::vector<i64> divisors(i64 n) {
  std::vector<i64> lo, hi;
  if (n < 0) n = -n;
  for (i64 d = 1; d * d <= n; ++d) {
    if (n % d == 0) {
      lo.push_back(d);
      if (d * d != n) hi.push_back(n / d);
    }
  }
  lo.insert(lo.end(), hi.rbegin(), hi.rend());
  return lo;
}

i64 euler_phi(i64 n) {
  i64 r = n;
  for (i64 p : prime_factors(n)) r = r / p * (p - 1);
  return r;
}

int moebius(i64 n) {
  int mu = 1;
  for (i64 p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      n /= p;
      if (n % p == 0) return 0;
      mu = -mu;
    }
  }
  if (n > 1) mu = -mu;
  return mu;
}

Rational::Rational(i64 num, i64 den) {
  if (den == 0) throw InvalidArgument("Rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i64 g = gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  num_ = num;
  den_ = den;
}

std::string Rational::str() const {
  return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

DirichletCharacter::DirichletCharacter(i64 modulus, std::vector<std::complex<double>> table)
    : modulus_(modulus), table_(std::move(table)) {
  if (modulus_ < 1) throw InvalidArgument("DirichletCharacter: modulus must be >= 1");
  if (static_cast<i64>(table_.size()) != modulus_)
    throw InvalidArgument("DirichletCharacter: table size must equal the modulus");
  for (i64 n = 0; n < modulus_; ++n) {
    bool unit = gcd(n, modulus_) == 1;
    double a = std::abs(table_[n]);
    if (unit ? std::fabs(a - 1.0) > 1e-12 : a != 0.0)
      throw InvalidArgument("DirichletCharacter: value at " + std::to_string(n) +
                            (unit ? " must have modulus 1" : " must be 0 off the units"));
  }
  if (std::abs(table_[mod(1, modulus_)] - 1.0) > 1e-12)
    throw InvalidArgument("DirichletCharacter: chi(1) must be 1");
  for (i64 a = 0; a < modulus_; ++a) {
    if (gcd(a, modulus_) != 1) continue;
    for (i64 b = a; b < modulus_; ++b) {
      if (gcd(b, modulus_) != 1) continue;
      if (std::abs(table_[a * b % modulus_] - table_[a] * table_[b]) > 1e-12)
        throw InvalidArgument("DirichletCharacter: table is not multiplicative");
    }
  }
}

std::complex<double> DirichletCharacter::operator()(i64 n) const {
  return table_[mod(n, modulus_)];
}

bool DirichletCharacter::is_trivial() const {
  for (i64 n = 0; n < modulus_; ++n)
    if (gcd(n, modulus_) == 1 && table_[n] != 1.0) return false;
  return true;
}

DirichletCharacter DirichletCharacter::conj() const {
  std::vector<std::complex<double>> t(table_.size());
  for (std::size_t n = 0; n < t.size(); ++n) t[n] = std::conj(table_[n]);
  return DirichletCharacter(modulus_, std::move(t));
}

DirichletCharacter DirichletCharacter::operator*(const DirichletCharacter& o) const {
  if (o.modulus_ != modulus_) throw InvalidArgument("DirichletCharacter: modulus mismatch");
  std::vector<std::complex<double>> t(table_.size());
  for (std::size_t n = 0; n < t.size(); ++n) {
    auto z = table_[n] * o.table_[n];
    t[n] = z == 0.0 ? z : z / std::abs(z);
  }
  return DirichletCharacter(modulus_, std::move(t));
}

namespace {

i64 powmod(i64 b, i64 e, i64 m) {
  __int128 r = 1 % m, x = mod(b, m);
  while (e > 0) {
    if (e & 1) r = r * x % m;
    x = x * x % m;
    e >>= 1;
  }
  return static_cast<i64>(r);
}

i64 primitive_root_prime_power(i64 p, int e) {
  i64 phi_p = p - 1;
  auto fs = prime_factors(phi_p);
  i64 g = 2;
  for (;; ++g) {
    bool ok = true;
    for (i64 q : fs)
      if (powmod(g, phi_p / q, p) == 1) ok = false;
    if (ok) break;
  }
  if (e >= 2 && powmod(g, p - 1, p * p) == 1) g += p;
  return g;
}

// Element that is x mod m1 and 1 mod m2 (m1, m2 coprime).
i64 crt_lift(i64 x, i64 m1, i64 m2) {
  if (m2 == 1) return mod(x, m1);
  i64 inv = mod_inverse(m2, m1);
  // 1 + m2 * t with t = (x - 1) / m2 mod m1.
  __int128 t = static_cast<__int128>(mod(x - 1, m1)) * inv % m1;
  return static_cast<i64>(1 + m2 * t);
}

// Odometer over exponent vectors, last coordinate fastest; false once it wraps.
bool next_exponents(std::vector<i64>& x, const std::vector<i64>& orders) {
  for (std::size_t j = x.size(); j-- > 0;) {
    if (++x[j] < orders[j]) return true;
    x[j] = 0;
  }
  return false;
}

}  // namespace

std::vector<DirichletCharacter> characters_mod(i64 l) {
  if (l < 1) throw InvalidArgument("characters_mod: l must be >= 1");
  std::vector<i64> gens, orders;
  i64 rest = l;
  for (i64 p : prime_factors(l)) {
    int e = 0;
    i64 pe = 1;
    while (rest % p == 0) {
      rest /= p;
      pe *= p;
      ++e;
    }
    i64 other = l / pe;
    if (p == 2) {
      if (e == 2) {
        gens.push_back(crt_lift(3, pe, other));
        orders.push_back(2);
      } else if (e >= 3) {
        gens.push_back(crt_lift(pe - 1, pe, other));
        orders.push_back(2);
        gens.push_back(crt_lift(5, pe, other));
        orders.push_back(pe / 4);
      }
    } else {
      gens.push_back(crt_lift(primitive_root_prime_power(p, e), pe, other));
      orders.push_back(pe / p * (p - 1));
    }
  }
  const std::size_t r = gens.size();
  std::vector<std::vector<i64>> logs(l);
  std::vector<i64> ex(r, 0);
  do {
    i64 u = 1 % l;
    for (std::size_t j = 0; j < r; ++j)
      u = static_cast<i64>(static_cast<__int128>(u) * powmod(gens[j], ex[j], l) % l);
    logs[u] = ex;
  } while (next_exponents(ex, orders));
  std::vector<DirichletCharacter> out;
  std::vector<i64> x(r, 0);
  do {
    std::vector<std::complex<double>> table(l, 0.0);
    for (i64 u = 0; u < l; ++u) {
      if (gcd(u, l) != 1) continue;
      double frac = 0.0;
      for (std::size_t j = 0; j < r; ++j)
        frac += static_cast<double>(mod(x[j] * logs[u][j], orders[j])) / orders[j];
      frac -= std::floor(frac);
      table[u] = std::polar(1.0, 2 * std::numbers::pi * frac);
    }
    if (l == 1) table[0] = 1.0;
    out.emplace_back(l, std::move(table));
  } while (next_exponents(x, orders));
  return out;
}

Estimate dirichlet_L(const DirichletCharacter& chi, int k, const PrecisionBudget& budget) {
  budget.validate();
  if (k < 2) throw InvalidArgument("dirichlet_L: weight k must be >= 2");
  double tail_target = budget.target_abs_error / 2;
  double n_real = std::ceil(std::pow((k - 1) * tail_target, 1.0 / (1 - k)));
  if (!(n_real <= static_cast<double>(budget.max_q_terms))) {
    double achievable = std::pow(static_cast<double>(budget.max_q_terms), 1 - k) / (k - 1);
    throw PrecisionUnreachable("dirichlet_L: " + std::to_string(static_cast<long long>(n_real)) +
                                   " terms needed, cap is " + std::to_string(budget.max_q_terms),
                               achievable);
  }
  i64 N = std::max<i64>(1, static_cast<i64>(n_real));
  CompensatedComplexSum s;
  for (i64 n = N; n >= 1; --n) {
    if (gcd(n, chi.modulus()) != 1) continue;
    s.add(chi(n) * std::pow(static_cast<double>(n), -k));
  }
  double tail = std::pow(static_cast<double>(N), 1 - k) / (k - 1);
  return {s.value(), tail + 4e-16 * std::abs(s.value())};
}

std::complex<double> gauss_coefficient(i64 i, const DirichletCharacter& chi) {
  const i64 l = chi.modulus();
  CompensatedComplexSum s;
  for (i64 t = 0; t < l; ++t) {
    if (gcd(t, l) != 1) continue;
    double frac = static_cast<double>(mod(-t * mod(i, l), l)) / l;
    s.add(std::polar(1.0, 2 * std::numbers::pi * frac) * std::conj(chi(t)));
  }
  return s.value() / static_cast<double>(euler_phi(l));
}

i64 ramanujan_sum(i64 l, i64 s) {
  if (l < 1) throw InvalidArgument("ramanujan_sum: l must be >= 1");
  i64 g = gcd(l, s);
  if (g == 0) g = l;
  i64 r = 0;
  for (i64 d : divisors(g)) r += moebius(l / d) * d;
  return r;
}

std::optional<Rational> rational_reconstruct(double x, double tol, i64 max_den) {
  if (!(tol > 0)) throw InvalidArgument("rational_reconstruct: tol must be positive");
  if (max_den < 1) throw InvalidArgument("rational_reconstruct: max_den must be >= 1");
  if (!std::isfinite(x) || std::fabs(x) > 9e18) return std::nullopt;
  long double a = x;
  long double p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  for (int it = 0; it < 80; ++it) {
    long double t = std::floor(a);
    long double p2 = t * p1 + p0, q2 = t * q1 + q0;
    if (q2 > static_cast<long double>(max_den)) break;
    if (std::fabs(static_cast<long double>(x) - p2 / q2) < tol)
      return Rational(static_cast<i64>(p2), static_cast<i64>(q2));
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    long double f = a - t;
    if (f == 0) break;
    a = 1 / f;
  }
  return std::nullopt;
}

Estimate residue_class_zeta(int k, i64 t, i64 l, double target) {
  if (k < 2 || l < 1) throw InvalidArgument("residue_class_zeta: need k >= 2, l >= 1");
  t = mod(t, l);
  const double kk = k;
  const double c4 = 2 * (std::pow(std::numbers::pi, 4) / 90) / std::pow(2 * std::numbers::pi, 4);
  auto remainder = [&](double n) {
    return c4 * kk * (kk + 1) * (kk + 2) * std::pow(static_cast<double>(l), 3) *
           std::pow(n, -kk - 3);
  };
  double n0 = 8.0 * l;
  while (remainder(n0) > target / 2) n0 *= 1.25;
  const i64 J = static_cast<i64>(std::ceil((n0 - t) / l));
  CompensatedSum s;
  for (i64 j = J - 1; j >= (t == 0 ? 1 : 0); --j) s.add(std::pow(static_cast<double>(t + j * l), -kk));
  const double n = static_cast<double>(t + J * l);
  const double ld = static_cast<double>(l);
  s.add(std::pow(n, 1 - kk) / (ld * (kk - 1)));
  s.add(std::pow(n, -kk) / 2);
  s.add(kk * ld * std::pow(n, -kk - 1) / 12);
  s.add(-kk * (kk + 1) * (kk + 2) * ld * ld * ld * std::pow(n, -kk - 3) / 720);
  double v = s.value();
  return {v, remainder(n) + 4e-16 * v};
}

}  // namespace teis
