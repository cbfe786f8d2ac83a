#include "teis/modular_group.hpp"

#include <cmath>
#include <deque>
#include <unordered_map>

#include "teis/errors.hpp"

namespace teis {

HalfPlanePoint::HalfPlanePoint(double x_, double y_) : x(x_), y(y_) {
  if (!std::isfinite(x) || !std::isfinite(y) || !(y > 0))
    throw InvalidArgument("HalfPlanePoint: need finite x and y > 0");
}

GroupElement::GroupElement(i64 a, i64 b, i64 c, i64 d) : a_(a), b_(b), c_(c), d_(d) {
  __int128 det = static_cast<__int128>(a) * d - static_cast<__int128>(b) * c;
  if (det != 1) throw InvalidArgument("GroupElement: determinant must be 1, got " + str());
}

GroupElement GroupElement::from_bottom_row(i64 c, i64 d) {
  if (c == 0) {
    if (d != 1 && d != -1) throw InvalidArgument("from_bottom_row: (0, d) needs d = +-1");
    return {d, 0, 0, d};
  }
  if (d == 0) {
    if (c != 1 && c != -1) throw InvalidArgument("from_bottom_row: (c, 0) needs c = +-1");
    return {0, -c, c, 0};
  }
  i64 x, y;
  if (ext_gcd(d, c, x, y) != 1)
    throw InvalidArgument("from_bottom_row: gcd(" + std::to_string(c) + ", " + std::to_string(d) +
                          ") != 1");
  // x d + y c = 1, so (a, b) = (x, -y); shift by t (c, d) to minimise |b|.
  i64 a = x, b = -y;
  i64 t = static_cast<i64>(std::llround(-static_cast<double>(b) / static_cast<double>(d)));
  for (i64 s : {t - 1, t, t + 1}) {
    if (std::llabs(b + s * d) < std::llabs(b + t * d)) t = s;
  }
  return {a + t * c, b + t * d, c, d};
}

GroupElement GroupElement::operator*(const GroupElement& o) const {
  auto mul = [](i64 p, i64 q, i64 r, i64 s) {
    __int128 v = static_cast<__int128>(p) * q + static_cast<__int128>(r) * s;
    if (v > INT64_MAX || v < INT64_MIN) throw InvalidArgument("GroupElement: entry overflow");
    return static_cast<i64>(v);
  };
  return {mul(a_, o.a_, b_, o.c_), mul(a_, o.b_, b_, o.d_), mul(c_, o.a_, d_, o.c_),
          mul(c_, o.b_, d_, o.d_)};
}

std::complex<double> GroupElement::act(std::complex<double> tau) const {
  return (double(a_) * tau + double(b_)) / (double(c_) * tau + double(d_));
}

std::string GroupElement::str() const {
  return "(" + std::to_string(a_) + "," + std::to_string(b_) + ";" + std::to_string(c_) + "," +
         std::to_string(d_) + ")";
}

namespace {

// Canonical representative of (c : d) in P^1(Z/l).
std::pair<i64, i64> p1_normalize(i64 c, i64 d, i64 l) {
  c = mod(c, l);
  d = mod(d, l);
  if (l == 1) return {0, 0};
  i64 g = gcd(c, l);
  if (g == 1) return {1, mod(d * mod_inverse(c, l), l)};
  i64 m = l / g;
  i64 u = m == 1 ? 1 : mod_inverse(c / g, m);
  while (gcd(u, l) != 1) u += m;
  i64 d1 = mod(u * d, l);
  i64 best = l;
  for (i64 t = 0; t < g; ++t) {
    i64 v = 1 + m * t;
    if (gcd(v, l) != 1) continue;
    best = std::min(best, mod(v * d1, l));
  }
  return {g, best};
}

i64 coset_key(const GroupElement& x, i64 l, Congruence kind) {
  auto [c, d] = kind == Congruence::Gamma0 ? p1_normalize(x.c(), x.d(), l)
                                            : std::pair{mod(x.c(), l), mod(x.d(), l)};
  return c * l + d;
}

}  // namespace

CosetTable enumerate_cosets(i64 l, Congruence kind) {
  if (l < 1) throw InvalidArgument("enumerate_cosets: l must be >= 1");
  CosetTable t;
  t.level = l;
  t.kind = kind;
  std::unordered_map<i64, std::size_t> index;
  const GroupElement gens[2] = {GroupElement::T(), GroupElement::S()};
  t.reps.push_back(GroupElement::identity());
  index[coset_key(t.reps[0], l, kind)] = 0;
  for (std::size_t x = 0; x < t.reps.size(); ++x) {
    std::array<std::size_t, 2> e{};
    for (int s = 0; s < 2; ++s) {
      GroupElement y = t.reps[x] * gens[s];
      auto [it, fresh] = index.emplace(coset_key(y, l, kind), t.reps.size());
      if (fresh) t.reps.push_back(y);
      e[s] = it->second;
    }
    t.edges.push_back(e);
  }
  return t;
}

i64 gamma0_index(i64 l) {
  i64 n = l;
  for (i64 p : prime_factors(l)) n = n / p * (p + 1);
  return n;
}

std::vector<GroupElement> gamma0_generators(i64 l) {
  CosetTable t = enumerate_cosets(l, Congruence::Gamma0);
  const GroupElement gens[2] = {GroupElement::T(), GroupElement::S()};
  // A tree edge is the first edge that discovered its target during the BFS.
  std::vector<bool> seen(t.reps.size(), false);
  seen[0] = true;
  std::vector<GroupElement> out;
  for (std::size_t x = 0; x < t.reps.size(); ++x) {
    for (int s = 0; s < 2; ++s) {
      std::size_t y = t.edges[x][s];
      GroupElement xs = t.reps[x] * gens[s];
      if (!seen[y] && xs == t.reps[y]) {
        seen[y] = true;
        continue;
      }
      GroupElement g = xs * t.reps[y].inverse();
      if (g == GroupElement::identity()) continue;
      bool dup = false;
      for (const auto& h : out) dup = dup || h == g;
      if (!dup) out.push_back(g);
    }
  }
  return out;
}

std::vector<GroupElement> coset_reps_gamma1(i64 l) {
  if (l < 1 || l > 100) throw InvalidArgument("coset_reps_gamma1: need 1 <= l <= 100");
  return enumerate_cosets(l, Congruence::Gamma1).reps;
}

namespace {

GroupElement random_element(i64 l, i64 max_c0, std::mt19937_64& rng, bool gamma1) {
  if (l < 1 || max_c0 < 1) throw InvalidArgument("random element: need l >= 1 and max_c0 >= 1");
  std::uniform_int_distribution<i64> c0(1, max_c0);
  std::uniform_int_distribution<int> sign(0, 1);
  for (;;) {
    i64 c = l * c0(rng) * (sign(rng) ? 1 : -1);
    i64 span = 4 * std::llabs(c);
    i64 d = std::uniform_int_distribution<i64>(-span, span)(rng);
    if (gamma1) d = d - mod(d, l) + 1 % l;
    if (gcd(c, d) != 1) continue;
    return GroupElement::from_bottom_row(c, d);
  }
}

}  // namespace

GroupElement random_gamma0(i64 l, i64 max_c0, std::mt19937_64& rng) {
  return random_element(l, max_c0, rng, false);
}

GroupElement random_gamma1(i64 l, i64 max_c0, std::mt19937_64& rng) {
  return random_element(l, max_c0, rng, true);
}

}  // namespace teis
