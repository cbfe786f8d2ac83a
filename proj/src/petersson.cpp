#include "teis/petersson.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "teis/errors.hpp"
#include "teis/summation.hpp"

namespace teis {

namespace {
constexpr double kPi = std::numbers::pi;

cplx unit_root(i64 num, i64 den) {
  return std::polar(1.0, 2 * kPi * static_cast<double>(mod(num, den)) / static_cast<double>(den));
}

double dpow(double x, int n) {
  double r = 1;
  for (int j = 0; j < n; ++j) r *= x;
  return r;
}

// sum_{m >= 1} m^{k-1} z^m = z A_{k-1}(z) / (1 - z)^k for 0 <= z < 1, A_n the Eulerian polynomial.
double power_sum(int k, double z) {
  if (z >= 1) return std::numeric_limits<double>::infinity();
  std::vector<double> e{1.0};
  for (int n = 1; n <= k - 1; ++n) {
    std::vector<double> f(n, 0.0);
    for (int j = 0; j < n; ++j) {
      if (j < static_cast<int>(e.size())) f[j] += (j + 1) * e[j];
      if (j >= 1 && j - 1 < static_cast<int>(e.size())) f[j] += (n - j) * e[j - 1];
    }
    e = std::move(f);
  }
  double a = 0;
  for (auto it = e.rbegin(); it != e.rend(); ++it) a = a * z + *it;
  return z * a / dpow(1 - z, k);
}
}  // namespace

LinearCombination::LinearCombination(cplx a, std::shared_ptr<const FormEvaluator> f, cplx b,
                                     std::shared_ptr<const FormEvaluator> g)
    : a_(a), b_(b), f_(std::move(f)), g_(std::move(g)) {
  if (!f_ || !g_) throw InvalidArgument("LinearCombination: null form");
  if (f_->level() != g_->level() || f_->weight() != g_->weight() || f_->twist() != g_->twist())
    throw InvalidArgument("LinearCombination: forms differ in level, weight or twist");
}

std::vector<cplx> LinearCombination::slash(const GroupElement& gamma, const std::vector<cplx>& taus) const {
  auto u = f_->slash(gamma, taus);
  auto v = g_->slash(gamma, taus);
  for (std::size_t j = 0; j < u.size(); ++j) u[j] = a_ * u[j] + b_ * v[j];
  return u;
}

CuspFormEvaluator::CuspFormEvaluator(FourierSeries g, int fricke_sign) : g_(std::move(g)), sign_(fricke_sign) {
  const i64 p = g_.level();
  if (p != 1 && prime_factors(p) != std::vector<i64>{p})
    throw UnsupportedLevel("CuspFormEvaluator: level must be prime or 1, got " + std::to_string(p));
  if (fricke_sign != 1 && fricke_sign != -1) throw InvalidArgument("CuspFormEvaluator: fricke sign must be +-1");
  if (!g_.is_cusp_form()) throw InvalidArgument("CuspFormEvaluator: a_0 must be 0");
  // Coefficient growth constant for the truncation bound, |a_n| <= growth n^{k/2}.
  growth_ = 2;
  for (i64 n = 1; n <= g_.degree(); ++n)
    growth_ = std::max(growth_, (std::abs(g_[n]) + g_.error_bounds()[n]) / std::pow(double(n), g_.weight() / 2.0));
}

cplx CuspFormEvaluator::value(cplx tau) const {
  const double x = std::exp(-2 * kPi * tau.imag());
  const i64 N = g_.degree();
  const double sw = g_.weight() / 2.0, n1 = static_cast<double>(N + 1);
  // Term ratios of growth n^s x^n decrease in n, so the tail is a geometric bound from n = N + 1.
  const double rho = x * std::pow((n1 + 1) / n1, sw);
  const double tail = rho < 1 ? growth_ * std::pow(n1, sw) * std::pow(x, n1) / (1 - rho)
                              : std::numeric_limits<double>::infinity();
  if (tail > 1e-12)
    throw PrecisionUnreachable("cusp form: Im tau = " + fmt_g(tau.imag()) + " needs more than " +
                                   std::to_string(N) + " coefficients",
                               tail);
  const cplx q = std::exp(cplx(0, 2 * kPi) * tau);
  cplx p = 1.0, s = 0.0;
  for (i64 n = 1; n <= N; ++n) {
    p *= q;
    s += g_[n] * p;
  }
  return s;
}

std::vector<cplx> CuspFormEvaluator::slash(const GroupElement& gamma, const std::vector<cplx>& taus) const {
  const i64 p = g_.level();
  std::vector<cplx> out(taus.size());
  if (p == 1 || gamma.in_gamma0(p)) {
    for (std::size_t j = 0; j < taus.size(); ++j) out[j] = value(taus[j]);
    return out;
  }
  const i64 shift = mod(gamma.d() * mod_inverse(gamma.c(), p), p);
  const double f = sign_ * std::pow(static_cast<double>(p), -g_.weight() / 2.0);
  for (std::size_t j = 0; j < taus.size(); ++j)
    out[j] = f * value((taus[j] + static_cast<double>(shift)) / static_cast<double>(p));
  return out;
}

UntwistedEisensteinEvaluator::UntwistedEisensteinEvaluator(i64 level, int weight, i64 index, double target)
    : level_(level), weight_(weight), index_(mod(index, level)), target_(target) {
  if (level < 1 || weight < 3) throw InvalidArgument("UntwistedEisensteinEvaluator: need l >= 1, k >= 3");
  zall_.assign(level, 0.0);
  for (i64 b = 0; b < level; ++b) {
    double s = residue_class_zeta(weight, b, level, target / 4).value.real();
    s += (weight % 2 ? -1.0 : 1.0) * residue_class_zeta(weight, -b, level, target / 4).value.real();
    zall_[b] = s;
  }
}

std::vector<cplx> UntwistedEisensteinEvaluator::slash(const GroupElement& gamma, const std::vector<cplx>& taus) const {
  const i64 l = level_;
  const int k = weight_;
  const double sgn = k % 2 ? -1.0 : 1.0;
  // psi of the row (alpha, beta) gamma^{-1}.
  auto psi = [&](i64 al, i64 be) -> cplx {
    i64 c = al * gamma.d() - be * gamma.c();
    i64 d = -al * gamma.b() + be * gamma.a();
    if (mod(c, l) != 0 || gcd(mod(d, l), l) != 1) return 0.0;
    return unit_root(-mod(d, l) * index_, l);
  };
  cplx t0 = 0;
  for (i64 b = 0; b < l; ++b) t0 += psi(0, b) * zall_[b];
  std::vector<cplx> G(l * l, 0.0);
  double gmax = 0;
  for (i64 al = 0; al < l; ++al)
    for (i64 s = 0; s < l; ++s) {
      cplx acc = 0;
      for (i64 b = 0; b < l; ++b) acc += (psi(al, b) + sgn * psi(-al, -b)) * unit_root(s * b, l);
      G[al * l + s] = acc;
      gmax = std::max(gmax, std::abs(acc));
    }
  double kfac = 1;
  for (int j = 2; j < k; ++j) kfac *= j;
  cplx pref = std::pow(static_cast<double>(l), -k) / kfac;
  for (int j = 0; j < k; ++j) pref *= cplx(0, -2 * kPi);
  const double pref_abs = std::abs(pref);

  std::vector<cplx> out(taus.size());
  for (std::size_t j = 0; j < taus.size(); ++j) {
    const cplx tau = taus[j];
    if (!(tau.imag() > 0)) throw InvalidArgument("UntwistedEisensteinEvaluator: tau must lie in the upper half plane");
    const double x1 = std::exp(-2 * kPi * tau.imag() / l);
    i64 C = 1;
    while (pref_abs * gmax * power_sum(k, std::pow(x1, double(C + 1))) / (1 - x1) > target_ / 2) ++C;
    CompensatedComplexSum s;
    s.add(t0);
    for (i64 c = 1; c <= C; ++c) {
      const cplx u = std::exp(cplx(0, 2 * kPi) * double(c) * tau / double(l));
      const double au = std::abs(u);
      const cplx* g = &G[(c % l) * l];
      cplx p = 1.0, row = 0.0;
      for (i64 m = 1;; ++m) {
        p *= u;
        const double mk = dpow(double(m), k - 1);
        row += mk * p * g[m % l];
        const double ratio = dpow(1.0 + 1.0 / m, k - 1) * au;
        if (ratio < 1 && mk * std::abs(p) * gmax * ratio / (1 - ratio) < 1e-3 * target_ / C) break;
      }
      s.add(pref * row);
    }
    out[j] = s.value();
  }
  return out;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw InvalidArgument("gauss_legendre: n must be >= 1");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5)), dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = 0;
      for (int j = 1; j <= n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1);
      double dz = p0 / dp;
      z -= dz;
      if (std::fabs(dz) < 1e-16) break;
    }
    double p0 = 1, p1 = 0;
    for (int j = 1; j <= n; ++j) {
      double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * j - 1) * z * p1 - (j - 1.0) * p2) / j;
    }
    dp = n * (z * p0 - p1) / (z * z - 1);
    nodes[i] = -z;
    nodes[n - 1 - i] = z;
    weights[i] = weights[n - 1 - i] = 2 / ((1 - z * z) * dp * dp);
  }
}

QuadratureGrid QuadratureGrid::make(int nx, int ny, double y_max) {
  if (nx < 2 || ny < 2) throw InvalidArgument("QuadratureGrid: need at least 2 nodes per direction");
  if (!(y_max >= 2) || !std::isfinite(y_max)) throw InvalidArgument("QuadratureGrid: y_max must be >= 2");
  QuadratureGrid g;
  g.nx = nx;
  g.ny = ny;
  g.y_max = y_max;
  std::vector<double> z, w;
  gauss_legendre(nx, z, w);
  for (int j = 0; j < nx; ++j) {
    g.x_nodes.push_back(z[j] / 2);
    g.x_weights.push_back(w[j] / 2);
  }
  gauss_legendre(ny, z, w);
  for (int j = 0; j < ny; ++j) {
    g.t_nodes.push_back((z[j] + 1) / 2);
    g.t_weights.push_back(w[j] / 2);
  }
  return g;
}

namespace {

cplx integrate(const FormEvaluator& f, const FormEvaluator& g, int k, const std::vector<GroupElement>& reps, i64 l,
               const QuadratureGrid& grid, double* tail_out) {
  CompensatedComplexSum total;
  double tail = 0;
  for (const auto& gamma : reps) {
    const double width = static_cast<double>(l / gcd(gamma.c(), l));
    const double y_top = grid.y_max * width;
    std::vector<cplx> taus;
    std::vector<double> wts;
    for (int a = 0; a < grid.nx; ++a) {
      const double x = grid.x_nodes[a];
      const double u0 = std::log(std::sqrt(1 - x * x)), u1 = std::log(y_top);
      for (int b = 0; b < grid.ny; ++b) {
        const double y = std::exp(u0 + grid.t_nodes[b] * (u1 - u0));
        taus.emplace_back(x, y);
        wts.push_back(grid.x_weights[a] * grid.t_weights[b] * (u1 - u0) * std::pow(y, k - 1));
      }
    }
    const auto fv = f.slash(gamma, taus);
    const auto gv = g.slash(gamma, taus);
    double peak = 0;
    for (std::size_t j = 0; j < taus.size(); ++j) {
      const cplx v = fv[j] * std::conj(gv[j]);
      total.add(v * wts[j]);
      peak = std::max(peak, std::abs(v) * std::pow(taus[j].imag(), k - 2));
    }
    std::vector<cplx> top;
    for (int a = 0; a < grid.nx; ++a) top.emplace_back(grid.x_nodes[a], y_top);
    const auto ft = f.slash(gamma, top);
    const auto gt = g.slash(gamma, top);
    double top_peak = 0, top_int = 0;
    for (int a = 0; a < grid.nx; ++a) {
      const double v = std::abs(ft[a] * std::conj(gt[a])) * std::pow(y_top, k - 2);
      top_peak = std::max(top_peak, v);
      top_int += grid.x_weights[a] * v;
    }
    if (top_peak > 1e-8 * peak)
      throw NonconvergentIntegrand("Petersson integrand does not decay at the cusp of translate " + gamma.str() +
                                   " (|f g y^{k-2}| at y = " + fmt_g(y_top) + " is " +
                                   fmt_g(top_peak) + ")");
    tail += top_int * width / kPi;
  }
  const double half = l >= 3 ? 0.5 : 1.0;
  *tail_out = tail * half;
  return total.value() * half;
}

}  // namespace

PeterssonResult inner(const FormEvaluator& f, const FormEvaluator& g, int k, i64 l, const Twist* h,
                      const QuadratureGrid& grid) {
  if (f.weight() != k || g.weight() != k) throw InvalidArgument("inner: form weights differ from k");
  if (f.level() != l || g.level() != l) throw InvalidArgument("inner: form levels differ from l");
  if (f.twist() != h || g.twist() != h) throw InvalidArgument("inner: forms must transform with the twist h");
  const auto reps = coset_reps_gamma1(l);
  PeterssonResult r;
  r.nx = grid.nx;
  r.ny = grid.ny;
  r.translates = reps.size();
  double tail = 0, coarse_tail = 0;
  r.value = integrate(f, g, k, reps, l, grid, &tail);
  const auto coarse = QuadratureGrid::make(std::max(2, grid.nx / 2), std::max(2, grid.ny / 2), grid.y_max);
  const cplx vc = integrate(f, g, k, reps, l, coarse, &coarse_tail);
  r.cusp_tail = tail;
  r.error_estimate = std::abs(r.value - vc) + tail;
  return r;
}

}  // namespace teis
