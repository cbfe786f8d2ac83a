#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "teis/arith.hpp"

namespace teis {

struct HalfPlanePoint {
  double x = 0.0;
  double y = 1.0;

  HalfPlanePoint() = default;
  HalfPlanePoint(double x_, double y_);
  static HalfPlanePoint from(std::complex<double> z) { return {z.real(), z.imag()}; }
  std::complex<double> z() const { return {x, y}; }
};

class GroupElement {
 public:
  /// Throws InvalidArgument unless ad - bc = 1.
  GroupElement(i64 a, i64 b, i64 c, i64 d);

  static GroupElement identity() { return {1, 0, 0, 1}; }
  static GroupElement T(i64 n = 1) { return {1, n, 0, 1}; }
  static GroupElement S() { return {0, -1, 1, 0}; }
  /// Completes a coprime bottom row (c, d) with the extended Euclid solution of smallest |b|.
  static GroupElement from_bottom_row(i64 c, i64 d);

  i64 a() const { return a_; }
  i64 b() const { return b_; }
  i64 c() const { return c_; }
  i64 d() const { return d_; }

  GroupElement operator*(const GroupElement& o) const;
  GroupElement inverse() const { return {d_, -b_, -c_, a_}; }
  GroupElement operator-() const { return {-a_, -b_, -c_, -d_}; }
  friend bool operator==(const GroupElement&, const GroupElement&) = default;

  std::complex<double> act(std::complex<double> tau) const;
  std::complex<double> automorphy(std::complex<double> tau) const { return double(c_) * tau + double(d_); }
  bool in_gamma0(i64 l) const { return mod(c_, l) == 0; }
  bool in_gamma1(i64 l) const { return in_gamma0(l) && mod(a_, l) == 1 % l && mod(d_, l) == 1 % l; }
  std::string str() const;

 private:
  i64 a_, b_, c_, d_;
};

enum class Congruence { Gamma0, Gamma1 };

/// Right cosets H\SL2(Z) found by breadth-first search on the coset graph of T and S.
struct CosetTable {
  i64 level = 1;
  Congruence kind = Congruence::Gamma0;
  std::vector<GroupElement> reps;
  /// edges[x] = {coset of reps[x]*T, coset of reps[x]*S}.
  std::vector<std::array<std::size_t, 2>> edges;
};

CosetTable enumerate_cosets(i64 l, Congruence kind);

/// Index of Gamma0(l) in SL2(Z): l prod_{p | l} (1 + 1/p).
i64 gamma0_index(i64 l);

/// Schreier generators rep_x g rep_{xg}^{-1} for the non-tree edges, identity dropped,
/// deterministic order. For l=1 this is {T, S}.
std::vector<GroupElement> gamma0_generators(i64 l);

/// Right-coset representatives of Gamma1(l)\SL2(Z), l <= 100. Cosets are labelled by the
/// bottom row mod l, so +-1 are kept distinct: the count is l^2 prod (1 - 1/p^2).
std::vector<GroupElement> coset_reps_gamma1(i64 l);

/// Random element of Gamma0(l) (or Gamma1(l)) with 0 < |c| <= l * max_c0, reproducible given rng.
GroupElement random_gamma0(i64 l, i64 max_c0, std::mt19937_64& rng);
GroupElement random_gamma1(i64 l, i64 max_c0, std::mt19937_64& rng);

}  // namespace teis
