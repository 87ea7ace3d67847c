#pragma once

#include <random>

#include "qtheta/series.hpp"
#include "qtheta/torus_series.hpp"

namespace testsupport {

using namespace qtheta;

inline Series useries(std::initializer_list<std::pair<int64_t, long>> terms, int64_t order = kExact) {
  std::map<int64_t, Cyclo> m;
  for (auto [e, c] : terms) m[e] = Cyclo(c);
  return Series::from_terms(m, order);
}

// q^k as a series, k in q-units
inline Series qpow(int64_t k) { return Series(UnitMonomial::u_power(2 * k)); }

inline Series random_series(std::mt19937& rng, const CycloField& F, int lo, int hi, int64_t order) {
  std::uniform_int_distribution<long> c(-5, 5);
  std::map<int64_t, Cyclo> m;
  for (int e = lo; e <= hi; ++e) {
    std::vector<mpq_class> v;
    for (int i = 0; i < F.degree(); ++i) v.emplace_back(c(rng), 1 + std::abs(c(rng)));
    m[e] = Cyclo(F, v);
  }
  return Series::from_terms(m, order);
}

inline Vec random_vec(std::mt19937& rng, int d, int R) {
  std::uniform_int_distribution<int64_t> dist(-R, R);
  Vec v(d);
  for (auto& x : v) x = dist(rng);
  return v;
}

}  // namespace testsupport
