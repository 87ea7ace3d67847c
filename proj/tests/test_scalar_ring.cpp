#include <random>

#include "doctest.h"
#include "qtheta/error.hpp"
#include "support.hpp"

using namespace qtheta;
using testsupport::useries;

TEST_CASE("cyclotomic arithmetic") {
  const auto& F2 = CycloField::get(2);
  CHECK(Cyclo(F2, {mpq_class(1, 2)}) + Cyclo(F2, {mpq_class(1, 2)}) == Cyclo(1));

  const auto& F4 = CycloField::get(4);
  Cyclo z4 = Cyclo::zeta_power(F4, 1);
  CHECK(z4 * z4 == Cyclo(-1));

  // m=3: (1+z)^{-1} by solving (1+z)(a+bz) = 1 mod z^2+z+1 by hand: a-b = 1, a = 0
  const auto& F3 = CycloField::get(3);
  Cyclo z3 = Cyclo::zeta_power(F3, 1);
  Cyclo inv = (Cyclo(1) + z3).inverse();
  CHECK(inv == -z3);
  CHECK(inv * (Cyclo(1) + z3) == Cyclo(1));

  CHECK_THROWS_AS(Cyclo(0).inverse(), Error);
  try {
    Cyclo(F3, {0}).inverse();
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DivisionByZero);
  }
}

TEST_CASE("cyclotomic fields mix only through rationals") {
  Cyclo a = Cyclo::zeta_power(CycloField::get(3), 1);
  Cyclo b = Cyclo::zeta_power(CycloField::get(4), 1);
  CHECK_THROWS_AS(a + b, Error);
  CHECK((a + Cyclo(2)).field().order() == 3);
}

TEST_CASE("roots of unity and square roots") {
  const auto& F = CycloField::get(3);  // mu_6 available
  for (long k = 0; k < 6; ++k) {
    Cyclo w = Cyclo::root_of_unity(F, k);
    REQUIRE(w.root_log());
    CHECK(*w.root_log() == k);
    CHECK(w.pow(6) == Cyclo(1));
  }
  CHECK(Cyclo::root_of_unity(F, 3) == Cyclo(-1));
  auto s = Cyclo(mpq_class(9, 4)).sqrt();
  REQUIRE(s);
  CHECK(*s * *s == Cyclo(mpq_class(9, 4)));
  CHECK_FALSE(Cyclo(2).sqrt());
  CHECK_FALSE(Cyclo(-1).sqrt());  // i is not in Q(zeta_3)
  auto i4 = Cyclo(CycloField::get(4), {-1}).sqrt();
  REQUIRE(i4);
  CHECK(*i4 * *i4 == Cyclo(-1));
}

TEST_CASE("m=1 agrees with rationals") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<long> d(-50, 50);
  for (int t = 0; t < 200; ++t) {
    mpq_class a(d(rng), 1 + std::abs(d(rng))), b(d(rng), 1 + std::abs(d(rng)));
    a.canonicalize();
    b.canonicalize();
    CHECK(Cyclo(a) + Cyclo(b) == Cyclo(mpq_class(a + b)));
    CHECK(Cyclo(a) * Cyclo(b) == Cyclo(mpq_class(a * b)));
    if (b != 0) CHECK(Cyclo(b).inverse() == Cyclo(mpq_class(1 / b)));
  }
}

TEST_CASE("series arithmetic") {
  Series a = useries({{0, 1}, {2, 1}}, 10), b = useries({{0, 1}, {2, -1}}, 10);
  CHECK(a * b == useries({{0, 1}, {4, -1}}, 10));

  // geometric series sum u^{2k} to order 6 times (1-u^2)
  Series g = useries({{0, 1}, {2, 1}, {4, 1}, {6, 1}}, 6);
  Series p = g * useries({{0, 1}, {2, -1}});
  CHECK(p == useries({{0, 1}}, 6));

  std::mt19937 rng(11);
  const auto& F = CycloField::get(5);
  for (int t = 0; t < 20; ++t) {
    Series s = testsupport::random_series(rng, F, -2, 5, 8);
    CHECK((s + (-s)).is_zero());
  }
}

TEST_CASE("series inverse") {
  CHECK(useries({{0, 1}}).inverse() == useries({{0, 1}}));
  Series inv = useries({{0, 1}, {1, -1}}, 4).inverse();
  // long division: 1/(1-u) = 1 + u + u^2 + ...
  CHECK(inv == useries({{0, 1}, {1, 1}, {2, 1}, {3, 1}, {4, 1}}, 4));
  CHECK(useries({{2, 1}}).inverse() == useries({{-2, 1}}));
  CHECK_THROWS_AS(useries({}, 5).inverse(), Error);
  // exact non-monomial needs a target order
  CHECK_THROWS_AS(useries({{0, 1}, {1, 1}}).inverse(), Error);
  CHECK(useries({{0, 1}, {1, 1}}).inverse(3) == useries({{0, 1}, {1, -1}, {2, 1}, {3, -1}}, 3));
}

TEST_CASE("valuation") {
  CHECK(*useries({{3, 1}, {5, 2}}).valuation() == 3);
  CHECK_FALSE(Series().valuation());
  std::mt19937 rng(3);
  const auto& F = CycloField::get(4);
  for (int t = 0; t < 30; ++t) {
    Series s = testsupport::random_series(rng, F, 0, 4, 10);
    Series r = testsupport::random_series(rng, F, 0, 4, 10);
    Series prod = s.times(UnitMonomial::u_power(2)) * r.times(UnitMonomial::u_power(3));
    CHECK(*prod.valuation() == 5 + *(s * r).valuation());
  }
}

TEST_CASE("ring axioms on random series") {
  std::mt19937 rng(5);
  const auto& F = CycloField::get(3);
  for (int t = 0; t < 25; ++t) {
    Series a = testsupport::random_series(rng, F, -1, 4, 9);
    Series b = testsupport::random_series(rng, F, 0, 3, 7);
    Series c = testsupport::random_series(rng, F, -2, 2, 8);
    Series l = (a * b) * c, r = a * (b * c);
    int64_t n = std::min(l.order(), r.order());
    CHECK(l.agrees_upto(r, n));
    Series d1 = a * (b + c), d2 = a * b + a * c;
    CHECK(d1.agrees_upto(d2, std::min(d1.order(), d2.order())));
    CHECK(*(a * b).valuation() == *a.valuation() + *b.valuation());
  }
}

TEST_CASE("inverse is two-sided on random unit-leading series") {
  std::mt19937 rng(17);
  const auto& F = CycloField::get(4);
  for (int t = 0; t < 100; ++t) {
    Series a = testsupport::random_series(rng, F, -1, 4, 8);
    if (a.is_zero()) continue;
    Series r = a.inverse();
    CHECK(*r.valuation() == -*a.valuation());
    Series p = a * r;
    CHECK(p.agrees_upto(Series(Cyclo(1)), p.order()));
    CHECK((r * a).agrees_upto(Series(Cyclo(1)), p.order()));
  }
}

TEST_CASE("unit monomials") {
  UnitMonomial m(Cyclo(-2), 3);
  CHECK((m * m.inverse()).is_one());
  CHECK(m.pow(2) == UnitMonomial(Cyclo(4), 6));
  CHECK_FALSE(m.sqrt());
  auto r = UnitMonomial(Cyclo(4), 6).sqrt();
  REQUIRE(r);
  CHECK(r->pow(2) == UnitMonomial(Cyclo(4), 6));
  CHECK_THROWS_AS(UnitMonomial(Cyclo(0), 1), Error);
}
