#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "teis/budget.hpp"

namespace teis {

using i64 = std::int64_t;

i64 gcd(i64 a, i64 b);
/// Least nonnegative residue of a mod m (m > 0).
i64 mod(i64 a, i64 m);
/// Inverse of a modulo m; throws InvalidArgument when gcd(a, m) != 1.
i64 mod_inverse(i64 a, i64 m);
/// Extended Euclid: returns g = gcd(a,b) >= 0 and sets x, y with a*x + b*y = g.
i64 ext_gcd(i64 a, i64 b, i64& x, i64& y);
i64 euler_phi(i64 n);
int moebius(i64 n);
std::vector<i64> prime_factors(i64 n);
std::vector<i64> divisors(i64 n);

class Rational {
 public:
  Rational() = default;
  Rational(i64 num, i64 den = 1);

  i64 num() const { return num_; }
  i64 den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const;

  friend bool operator==(const Rational&, const Rational&) = default;

 private:
  i64 num_ = 0;
  i64 den_ = 1;
};

/// A character of (Z/lZ)^*, stored as a value table on all residues (0 off the units).
class DirichletCharacter {
 public:
  /// `table[n]` for n in [0, l); entries at non-units must be 0 and at units of modulus 1.
  DirichletCharacter(i64 modulus, std::vector<std::complex<double>> table);

  i64 modulus() const { return modulus_; }
  std::complex<double> operator()(i64 n) const;
  const std::vector<std::complex<double>>& table() const { return table_; }
  bool is_trivial() const;
  DirichletCharacter conj() const;
  DirichletCharacter operator*(const DirichletCharacter& o) const;

 private:
  i64 modulus_;
  std::vector<std::complex<double>> table_;
};

/// All phi(l) characters mod l, trivial first, then by exponent vector on the
/// cyclic factors of (Z/lZ)^* in lexicographic order.
std::vector<DirichletCharacter> characters_mod(i64 l);

/// sum_{n>0, gcd(n,l)=1} chi(n) n^-k with tail bound N^{1-k}/(k-1).
Estimate dirichlet_L(const DirichletCharacter& chi, int k, const PrecisionBudget& budget);

/// (1/phi(l)) sum_t e^{-2 pi i t i / l} conj(chi(t)).
std::complex<double> gauss_coefficient(i64 i, const DirichletCharacter& chi);

/// sum over units j mod l of e^{2 pi i j s / l}, computed as sum_{d | gcd(l,s)} mu(l/d) d.
i64 ramanujan_sum(i64 l, i64 s);

std::optional<Rational> rational_reconstruct(double x, double tol, i64 max_den);

/// Sum of (t + j l)^-k over j >= 0 with t + j l > 0, i.e. the residue class of t
/// among positive integers, by direct summation plus an Euler-Maclaurin tail.
Estimate residue_class_zeta(int k, i64 t, i64 l, double target);

}  // namespace teis
