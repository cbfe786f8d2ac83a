#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <memory>
#include <string>
#include <vector>

#include "teis/cuspform.hpp"
#include "teis/eisenstein.hpp"
#include "teis/series_io.hpp"

namespace teis::test {

inline const FourierSeries& eta11() {
  static const FourierSeries h = eta_product_weight2(11, 400000);
  return h;
}

inline std::shared_ptr<const Twist> eta11_twist() {
  static const auto t = std::make_shared<const Twist>(eta11());
  return t;
}

inline std::shared_ptr<const Twist> zero_twist(i64 l) { return std::make_shared<const Twist>(zero_form(l, 1)); }

/// Exact coefficients of E_{k,i;0} / E_{k,j;0} up to q^M.
inline std::vector<boost::multiprecision::cpp_rational> exact_quotient(i64 l, int k, i64 i, i64 j, i64 M) {
  using boost::multiprecision::cpp_rational;
  auto r = [&](i64 t, i64 m) {
    Rational x = untwisted_normalized(l, k, t, m);
    return cpp_rational(x.num(), x.den());
  };
  std::vector<cpp_rational> q(M + 1);
  const cpp_rational b0 = r(j, 0);
  for (i64 m = 0; m <= M; ++m) {
    cpp_rational s = r(i, m);
    for (i64 t = 1; t <= m; ++t) s -= r(j, t) * q[m - t];
    q[m] = s / b0;
  }
  return q;
}

inline std::string data_path(const std::string& name) { return std::string(TEIS_DATA_DIR) + "/" + name; }

}  // namespace teis::test
