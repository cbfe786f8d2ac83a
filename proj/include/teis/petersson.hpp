#pragma once

#include <memory>
#include <vector>

#include "teis/cuspform.hpp"
#include "teis/modular_group.hpp"

namespace teis {

/// A weight-k form that can be slashed by any element of SL2(Z). Thread-safe.
class FormEvaluator {
 public:
  virtual ~FormEvaluator() = default;
  virtual i64 level() const = 0;
  virtual int weight() const = 0;
  /// (f|_k gamma)(tau) at each tau.
  virtual std::vector<cplx> slash(const GroupElement& gamma, const std::vector<cplx>& taus) const = 0;
  cplx slash(const GroupElement& gamma, cplx tau) const { return slash(gamma, std::vector<cplx>{tau})[0]; }
  /// True when the form vanishes at every cusp.
  virtual bool cuspidal() const = 0;
  /// The twist the form transforms with; nullptr when untwisted.
  virtual const Twist* twist() const { return nullptr; }
};

class ZeroEvaluator : public FormEvaluator {
 public:
  ZeroEvaluator(i64 level, int weight) : level_(level), weight_(weight) {}
  i64 level() const override { return level_; }
  int weight() const override { return weight_; }
  std::vector<cplx> slash(const GroupElement&, const std::vector<cplx>& taus) const override {
    return std::vector<cplx>(taus.size(), 0.0);
  }
  bool cuspidal() const override { return true; }

 private:
  i64 level_;
  int weight_;
};

/// a f + b g.
class LinearCombination : public FormEvaluator {
 public:
  LinearCombination(cplx a, std::shared_ptr<const FormEvaluator> f, cplx b, std::shared_ptr<const FormEvaluator> g);
  i64 level() const override { return f_->level(); }
  int weight() const override { return f_->weight(); }
  std::vector<cplx> slash(const GroupElement& gamma, const std::vector<cplx>& taus) const override;
  bool cuspidal() const override { return f_->cuspidal() && g_->cuspidal(); }
  const Twist* twist() const override { return f_->twist(); }

 private:
  cplx a_, b_;
  std::shared_ptr<const FormEvaluator> f_, g_;
};

/// Cusp form on Gamma0(p), p prime or 1, with trivial character and Fricke eigenvalue
/// `fricke_sign`: g|gamma = g on Gamma0(p), otherwise gamma = delta S T^j with delta in
/// Gamma0(p) and (g|S T^j)(tau) = sign p^{-k/2} g((tau + j)/p).
class CuspFormEvaluator : public FormEvaluator {
 public:
  CuspFormEvaluator(FourierSeries g, int fricke_sign);
  i64 level() const override { return g_.level(); }
  int weight() const override { return g_.weight(); }
  std::vector<cplx> slash(const GroupElement& gamma, const std::vector<cplx>& taus) const override;
  bool cuspidal() const override { return true; }
  /// q-expansion value; throws PrecisionUnreachable when Im tau is too small for the stored terms.
  cplx value(cplx tau) const;

 private:
  FourierSeries g_;
  int sign_;
  double growth_;
};

/// Untwisted E_{k,i;0} slashed by arbitrary gamma: the c = 0 row from residue-class zeta
/// values, each pair of rows +-c by the Lipschitz formula.
class UntwistedEisensteinEvaluator : public FormEvaluator {
 public:
  UntwistedEisensteinEvaluator(i64 level, int weight, i64 index, double target = 1e-15);
  i64 level() const override { return level_; }
  int weight() const override { return weight_; }
  std::vector<cplx> slash(const GroupElement& gamma, const std::vector<cplx>& taus) const override;
  bool cuspidal() const override { return false; }

 private:
  i64 level_;
  int weight_;
  i64 index_;
  double target_;
  std::vector<double> zall_;  // sum over d = beta mod l, d != 0, of d^-k
};

/// Tensor Gauss-Legendre rule on the standard fundamental domain: x in [-1/2, 1/2] and
/// u = log y from log sqrt(1 - x^2) to log(y_max * cusp width).
struct QuadratureGrid {
  int nx = 24;
  int ny = 48;
  double y_max = 8.0;
  std::vector<double> x_nodes, x_weights;  // on [-1/2, 1/2]
  std::vector<double> t_nodes, t_weights;  // on [0, 1]

  static QuadratureGrid make(int nx, int ny, double y_max = 8.0);
  QuadratureGrid refined() const { return make(2 * nx, 2 * ny, y_max); }
};

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

struct PeterssonResult {
  cplx value{};
  double error_estimate = 0.0;
  double cusp_tail = 0.0;
  int nx = 0, ny = 0;
  std::size_t translates = 0;
};

/// <f, g> over Gamma1(l)\H. Coset translates are labelled by bottom rows mod l, which
/// counts each point twice when -1 is not in Gamma1(l); the sum is halved in that case.
PeterssonResult inner(const FormEvaluator& f, const FormEvaluator& g, int k, i64 l, const Twist* h,
                      const QuadratureGrid& grid);

}  // namespace teis
