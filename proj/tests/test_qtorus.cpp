#include <random>

#include "doctest.h"
#include "qtheta/error.hpp"
#include "qtheta/quant_param.hpp"
#include "qtheta/torus_series.hpp"
#include "support.hpp"

using namespace qtheta;
using testsupport::qpow;

namespace {

UnitMonomial q(int64_t k) { return UnitMonomial::u_power(2 * k); }

// sum q^{n^2} t^n on Z with alpha = 1, built by hand (no builtin registry)
TorusSeries plain_theta(const QuantParam& P) {
  CertPiece piece{{0}, IntMatrix{{1}}, {false}, {Quadratic{{{mpq_class(2)}}, {mpq_class(0)}, 0}}};
  return TorusSeries::rule(
      P, SeriesKind::Proper, Certificate(1, {piece}),
      [](const Vec& h, int64_t N) {
        Series s(q(h[0] * h[0]));
        return s.truncated(N);
      },
      "theta");
}

TorusSeries random_algebraic(std::mt19937& rng, const QuantParam& P, int terms) {
  std::map<Vec, Series> m;
  std::uniform_int_distribution<long> c(-3, 3);
  for (int i = 0; i < terms; ++i) {
    Vec h = testsupport::random_vec(rng, P.rank(), 3);
    m[h] = testsupport::useries({{c(rng) + 3, c(rng) == 0 ? 1 : c(rng)}, {c(rng) + 7, 1}});
  }
  return TorusSeries::algebraic(P, m);
}

bool same_terms(const TorusSeries& a, const TorusSeries& b) {
  const auto& x = a.terms();
  const auto& y = b.terms();
  if (x.size() != y.size()) return false;
  for (const auto& [h, s] : x) {
    auto it = y.find(h);
    if (it == y.end() || it->second != s) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("alpha on the quantum torus") {
  QuantParam T = QuantParam::quantum_torus();
  CHECK(T.alpha({1, 0}, {0, 1}) == q(1));
  CHECK(T.alpha({1, 0}, {1, 0}).is_one());
  CHECK(T.alpha({2, 1}, {1, -1}) == q(-3));
  CHECK_THROWS_AS(T.alpha({1}, {0, 1}), Error);
}

TEST_CASE("characteristic epsilon") {
  QuantParam T = QuantParam::quantum_torus();
  CHECK(T.epsilon({3, -2}) == 1);
  QuantParam S(IntMatrix{{0}}, IntMatrix{{1}});
  CHECK(S.epsilon({1}) == -1);
  CHECK(S.epsilon({2}) == 1);
  std::mt19937 rng(9);
  QuantParam W(IntMatrix{{0, 3, -1}, {-3, 0, 2}, {1, -2, 0}}, IntMatrix{{1, 1, 0}, {1, 0, 1}, {0, 1, 1}});
  for (int t = 0; t < 100; ++t) {
    Vec g = testsupport::random_vec(rng, 3, 5), h = testsupport::random_vec(rng, 3, 5);
    CHECK(W.epsilon(vec_add(g, h)) == W.epsilon(g) * W.epsilon(h));
    CHECK((W.alpha(g, h) * W.alpha(h, g)).is_one());
    CHECK(W.alpha(h, h) == UnitMonomial::sign(W.epsilon(h)));
  }
}

TEST_CASE("deformed product of exponents") {
  QuantParam T = QuantParam::quantum_torus();
  auto u = TorusSeries::monomial(T, {1, 0}), v = TorusSeries::monomial(T, {0, 1});
  auto uv = multiply(u, v), vu = multiply(v, u);
  CHECK(uv.terms().at({1, 1}) == qpow(1));
  CHECK(vu.terms().at({1, 1}) == qpow(-1));
  CHECK(same_terms(uv, scale(vu, q(2))));
  auto p = multiply(TorusSeries::monomial(T, {2, 0}), TorusSeries::monomial(T, {0, 3}));
  CHECK(p.terms().at({2, 3}) == qpow(6));

  QuantParam triv = QuantParam::trivial(2);
  auto a = multiply(TorusSeries::monomial(triv, {1, 2}), TorusSeries::monomial(triv, {-3, 1}));
  CHECK(a.terms().at({-2, 3}) == Series(Cyclo(1)));
}

TEST_CASE("exponent multiplication is associative") {
  std::mt19937 rng(21);
  QuantParam W(IntMatrix{{0, 3, -1}, {-3, 0, 2}, {1, -2, 0}}, IntMatrix{{1, 0, 0}, {0, 0, 1}, {0, 1, 1}});
  for (int t = 0; t < 100; ++t) {
    Vec f = testsupport::random_vec(rng, 3, 4), g = testsupport::random_vec(rng, 3, 4),
        h = testsupport::random_vec(rng, 3, 4);
    CHECK(W.alpha(f, g) * W.alpha(vec_add(f, g), h) == W.alpha(g, h) * W.alpha(f, vec_add(g, h)));
  }
}

TEST_CASE("point evaluation") {
  TorusPoint x({q(2), UnitMonomial()});
  CHECK(x.eval({3, 0}) == q(6));
  CHECK(TorusPoint::identity(2).eval({5, -4}).is_one());
  std::mt19937 rng(8);
  for (int t = 0; t < 50; ++t) {
    TorusPoint a({UnitMonomial(Cyclo(-1), t % 5), q(t % 3 - 1)}), b({q(1), UnitMonomial(Cyclo(2), -t % 4)});
    Vec h = testsupport::random_vec(rng, 2, 5);
    CHECK((a * b).eval(h) == a.eval(h) * b.eval(h));
  }
}

TEST_CASE("shift pullback") {
  QuantParam P = QuantParam::trivial(1);
  TorusPoint x({q(1)});
  auto e3 = shift_pullback(x, TorusSeries::monomial(P, {3}));
  CHECK(e3.terms().at({3}) == qpow(3));
  auto th = plain_theta(P);
  auto shifted = shift_pullback(x, th);
  CHECK(shifted.kind() == SeriesKind::Proper);
  for (int64_t n = -6; n <= 6; ++n) CHECK(shifted.coeff({n}, 200) == qpow(n * n + n).truncated(200));
  auto ident = shift_pullback(TorusPoint::identity(1), th);
  for (int64_t n = -4; n <= 4; ++n) CHECK(ident.coeff({n}, 100) == th.coeff({n}, 100));
}

TEST_CASE("hidden points") {
  QuantParam T = QuantParam::quantum_torus();
  CHECK(T.hidden_point({1, 0}) == TorusPoint({UnitMonomial(), q(-1)}));
  CHECK(QuantParam::trivial(2).hidden_point({4, 1}).is_identity());
  std::mt19937 rng(12);
  QuantParam W(IntMatrix{{0, 3, -1}, {-3, 0, 2}, {1, -2, 0}}, IntMatrix{{1, 1, 0}, {1, 0, 1}, {0, 1, 1}});
  for (int t = 0; t < 100; ++t) {
    Vec g = testsupport::random_vec(rng, 3, 4), h = testsupport::random_vec(rng, 3, 4);
    CHECK(W.hidden_point(h).eval(g) == W.alpha(g, h));
    CHECK(W.hidden_point(h).eval(g) == W.hidden_point(vec_neg(g)).eval(h));
    CHECK(W.hidden_point(vec_add(g, h)) == W.hidden_point(g) * W.hidden_point(h));
  }
}

TEST_CASE("series product") {
  QuantParam P = QuantParam::trivial(1);
  auto th = plain_theta(P);
  auto one = TorusSeries::one(P);
  auto same = multiply(th, one);
  for (int64_t n = -5; n <= 5; ++n) CHECK(same.coeff({n}, 60) == th.coeff({n}, 60));

  // coefficient of t^0 in theta^2 is sum_k q^{2k^2}
  auto sq = multiply(th, th);
  Series c0 = sq.coeff({0}, 16);
  CHECK(c0 == (Series(Cyclo(1)) + qpow(2).scaled(2) + qpow(8).scaled(2)).truncated(16));
  // general coefficient against a direct convolution sum
  for (int64_t n = -6; n <= 6; ++n) {
    Series want = Series::zero(60);
    for (int64_t k = -20; k <= 20; ++k) want += qpow(k * k + (n - k) * (n - k)).truncated(60);
    CHECK(sq.coeff({n}, 60) == want);
  }
  CHECK(sq.coeff({0}, 16).order() == 16);
}

TEST_CASE("formal operands are rejected") {
  QuantParam P = QuantParam::trivial(1);
  auto formal = TorusSeries::rule(
      P, SeriesKind::Formal, std::nullopt, [](const Vec&, int64_t N) { return Series(Cyclo(1)).truncated(N); }, "ones");
  try {
    multiply(formal, TorusSeries::one(P));
    FAIL("expected NotMultipliable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotMultipliable);
  }
}

TEST_CASE("commutativity and uv = q^2 vu") {
  std::mt19937 rng(31);
  QuantParam P = QuantParam::trivial(2);
  for (int t = 0; t < 20; ++t) {
    auto a = random_algebraic(rng, P, 4), b = random_algebraic(rng, P, 4);
    CHECK(same_terms(multiply(a, b), multiply(b, a)));
  }
}

TEST_CASE("conjugation by exponents is a hidden shift") {
  QuantParam T = QuantParam::quantum_torus();
  auto v = TorusSeries::monomial(T, {0, 1});
  CHECK(conjugation_check(T, {1, 0}, v));
  auto conj = multiply(multiply(TorusSeries::monomial(T, {1, 0}), v), TorusSeries::monomial(T, {-1, 0}));
  CHECK(conj.terms().at({0, 1}) == qpow(2));
  QuantParam triv = QuantParam::trivial(2);
  std::mt19937 rng(41);
  CHECK(conjugation_check(triv, {2, 1}, random_algebraic(rng, triv, 5)));
  QuantParam W(IntMatrix{{0, 3, -1}, {-3, 0, 2}, {1, -2, 0}}, IntMatrix{{1, 1, 0}, {1, 0, 1}, {0, 1, 1}});
  for (int t = 0; t < 40; ++t) {
    CHECK(conjugation_check(T, testsupport::random_vec(rng, 2, 3), random_algebraic(rng, T, 4)));
    CHECK(conjugation_check(W, testsupport::random_vec(rng, 3, 3), random_algebraic(rng, W, 4)));
  }
}

TEST_CASE("products do not depend on enumerator slack") {
  QuantParam P = QuantParam::trivial(1);
  auto th = plain_theta(P);
  auto loose = th.with_certificate(th.certificate().relaxed(7));
  auto a = multiply(th, th), b = multiply(loose, th), c = multiply(loose, loose);
  for (int64_t n = -4; n <= 4; ++n) {
    CHECK(a.coeff({n}, 40) == b.coeff({n}, 40));
    CHECK(a.coeff({n}, 40) == c.coeff({n}, 40));
  }
}

TEST_CASE("window evaluation is deterministic and parallel-safe") {
  QuantParam P = QuantParam::trivial(1);
  auto sq = multiply(plain_theta(P), plain_theta(P));
  auto t1 = evaluate(sq, 6, 40, 1);
  auto t2 = evaluate(multiply(plain_theta(P), plain_theta(P)), 6, 40, 4);
  REQUIRE(t1.cells.size() == 13);
  for (size_t i = 0; i < t1.cells.size(); ++i) {
    CHECK(t1.cells[i].first == t2.cells[i].first);
    CHECK(t1.cells[i].second == t2.cells[i].second);
  }
}

TEST_CASE("rank zero lattice is the base field") {
  QuantParam P = QuantParam::trivial(0);
  auto a = TorusSeries::algebraic(P, {{Vec{}, qpow(2)}});
  auto b = multiply(a, a);
  CHECK(b.terms().at(Vec{}) == qpow(4));
}
