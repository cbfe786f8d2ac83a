#pragma once

#include <memory>
#include <vector>

#include "teis/arith.hpp"
#include "teis/budget.hpp"
#include "teis/cuspform.hpp"
#include "teis/modular_group.hpp"

namespace teis {

class EisensteinSpec {
 public:
  /// Rejects k < 3: the defining lattice sum is not absolutely convergent for k = 1, 2.
  EisensteinSpec(i64 level, int weight, i64 twist_index, std::shared_ptr<const Twist> twist);

  i64 level() const { return level_; }
  int weight() const { return weight_; }
  i64 twist_index() const { return index_; }
  const Twist& twist() const { return *twist_; }
  const std::shared_ptr<const Twist>& twist_ptr() const { return twist_; }
  EisensteinSpec with_index(i64 i) const { return {level_, weight_, i, twist_}; }

 private:
  i64 level_;
  int weight_;
  i64 index_;
  std::shared_ptr<const Twist> twist_;
};

/// sum over (c, d) with l | c, d = r mod l, of e^{2 pi i Re H(-d/c)} (c tau + d)^-k, for each r.
/// With coprime_only the pairs satisfy gcd(c, d) = 1, otherwise gcd(d, l) = 1.
struct LatticeSums {
  std::vector<cplx> by_residue;
  double error_bound = 0.0;
  double radius = 0.0;
  i64 terms = 0;
};

/// The tail bound is multiplied by tail_weight in [0, 1] (a caller-side cancellation factor).
LatticeSums lattice_sums(i64 l, int k, const Twist& twist, HalfPlanePoint tau, bool coprime_only,
                         const PrecisionBudget& budget, double tail_weight = 1.0);

/// Tail bound for sum_{w in Z(l tau) + Z, |w| > R} |w|^-k (covering-radius argument).
double lattice_tail_bound(i64 l, int k, HalfPlanePoint tau, double R);

Estimate eval_direct(const EisensteinSpec& spec, HalfPlanePoint tau, const PrecisionBudget& budget);
Estimate eval_hat(i64 level, int k, const DirichletCharacter& chi, const Twist& twist, HalfPlanePoint tau,
                  const PrecisionBudget& budget);

/// Normalized coefficients r_m = (2 pi i)^-k R_m, m = 0..M, with error bounds.
struct QExpansion {
  i64 level = 1;
  int weight = 3;
  i64 twist_index = 0;
  std::vector<cplx> coeffs;
  std::vector<double> errors;
  /// |r_m| <= growth * m^{k-1} for every m >= 1.
  double growth = 0.0;

  i64 degree() const { return static_cast<i64>(coeffs.size()) - 1; }
  FourierSeries normalized() const;
  FourierSeries raw() const;
  /// sum_m (2 pi i)^k r_m q^m with truncation and coefficient errors folded into the bound.
  Estimate evaluate(HalfPlanePoint tau) const;
};

struct FourierOptions {
  /// Per-m target for the normalized coefficient (size M + 1); empty means budget target for all m.
  std::vector<double> targets;
  int threads = 1;
};

QExpansion fourier_coeffs(const EisensteinSpec& spec, i64 M, const PrecisionBudget& budget);
/// Same computation for several twist indices sharing one pass over the denominators.
std::vector<QExpansion> fourier_coeffs_multi(i64 level, int k, const std::vector<i64>& indices,
                                             const Twist& twist, i64 M, const PrecisionBudget& budget,
                                             const FourierOptions& options = {});

/// Integer sum_{r | m} r^{k-1} [c_l(i - r) + (-1)^k c_l(i + r)], m >= 1.
i64 untwisted_exact(i64 l, int k, i64 i, i64 m);
/// Exact normalized coefficient r_m of E_{k,i;0}; m = 0 is the constant term.
Rational untwisted_normalized(i64 l, int k, i64 i, i64 m);

struct Residual {
  double residual = 0.0;
  double error_bound = 0.0;
};

Residual dedekind_check(i64 level, int k, i64 i, const Twist& twist, HalfPlanePoint tau,
                        const PrecisionBudget& budget);

/// |E_{k,i}(gamma tau) - (c tau + d)^k e^{-2 pi i Re H(-d/c)} E_{k,a i}(tau)| from direct lattice sums.
Residual modularity_residual(const EisensteinSpec& spec, const GroupElement& gamma, HalfPlanePoint tau,
                             const PrecisionBudget& budget);
/// Same law with both sides evaluated from q-expansions; `by_index[j]` is the expansion of E_{k,j}.
Residual modularity_residual(const std::vector<QExpansion>& by_index, i64 i, const GroupElement& gamma,
                             HalfPlanePoint tau, const FourierSeries& h, const PrecisionBudget& budget);

/// max_{m <= M} |Im r_m|.
Residual reality_check(const EisensteinSpec& spec, i64 M, const PrecisionBudget& budget);

}  // namespace teis
