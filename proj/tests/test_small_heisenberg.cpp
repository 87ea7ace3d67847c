#include "doctest.h"
#include "mult_support.hpp"
#include "qtheta/small_heisenberg.hpp"

using namespace qtheta;
using namespace testsupport;

namespace {

const CycloField& F12() { return CycloField::get(12); }

UnitMonomial cst(long v) { return UnitMonomial(Cyclo(v), 0); }

SmallHeisElement as_small(const HeisElement& e) { return {e.c_l(), e.x_l(), e.h_l()}; }

// entrywise agreement up to the smaller known order
bool same_matrix(const SeriesMatrix& a, const SeriesMatrix& b) {
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a.size(); ++j)
      if (!a[i][j].agrees_upto(b[i][j], std::min(a[i][j].order(), b[i][j].order()))) return false;
  return true;
}

SeriesMatrix matmul(const SeriesMatrix& a, const SeriesMatrix& b) {
  size_t n = a.size();
  SeriesMatrix c(n, std::vector<Series>(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      for (size_t k = 0; k < n; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

std::vector<Multiplier> random_cyclo_multipliers(std::mt19937& rng, int count) {
  std::vector<Multiplier> out;
  std::vector<QuantParam> params = {QuantParam::trivial(2, F12()),
                                    QuantParam(IntMatrix{{0, 2}, {-2, 0}}, IntMatrix(2, 2), F12()),
                                    QuantParam(signed_param().A(), signed_param().S(), F12())};
  for (int t = 0; t < count; ++t) {
    const QuantParam& P = params[t % params.size()];
    out.push_back(random_multiplier(rng, P, random_nonsingular(rng, P.rank()), random_pd(rng, P.rank())));
  }
  return out;
}

}  // namespace

TEST_CASE("normalizer membership") {
  Multiplier L2 = level2_multiplier();
  CHECK(normalizer_membership(L2, {UnitMonomial(), TorusPoint::identity(1), {0}}));
  CHECK(normalizer_membership(L2, {UnitMonomial(), TorusPoint({cst(-1)}), {0}}));
  CHECK(normalizer_membership(L2, {UnitMonomial(), TorusPoint({qm(1)}), {1}}));
  CHECK(normalizer_membership(L2, {cst(5), TorusPoint({qm(1) * cst(-1)}), {1}}));
  CHECK(!normalizer_membership(L2, {UnitMonomial(), TorusPoint({qm(2)}), {1}}));
  CHECK(!normalizer_membership(L2, {UnitMonomial(), TorusPoint({cst(2)}), {0}}));

  // agreement with direct conjugation of the generator images
  std::mt19937 rng(1);
  auto Ls = random_cyclo_multipliers(rng, 6);
  Ls.push_back(L2);
  for (const auto& L : Ls) {
    int d = L.param().rank();
    for (int t = 0; t < 10; ++t) {
      SmallHeisElement g{random_unit(rng), random_point(rng, d, 2), random_vec(rng, d, 2)};
      CHECK(normalizer_membership(L, g) == normalizes_by_conjugation(L, g));
      Vec gamma = random_vec(rng, d, 2);
      for (const auto& lift : gamma_lift(L, gamma)) {
        CHECK(normalizer_membership(L, lift));
        CHECK(normalizes_by_conjugation(L, lift));
      }
    }
  }

  // L(B) -> T x H not injective: two generators with the same image data
  QuantParam P = QuantParam::trivial(1);
  Multiplier dup(P, {L2.images()[0], HeisElement::identity(P)});
  try {
    normalizer_membership(dup, {UnitMonomial(), TorusPoint::identity(1), {0}});
    FAIL("expected NonInjectiveImage");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::NonInjectiveImage);
  }
}

TEST_CASE("conjugation by normalizer elements") {
  std::mt19937 rng(2);
  for (const auto& L : random_cyclo_multipliers(rng, 6)) {
    QuotientData Q = L.quotient();
    for (const auto& g : Q.coset_reps())
      for (const auto& lift : gamma_lift(L, g)) {
        HeisElement e = lift.element(L.param());
        for (int t = 0; t < 3; ++t) {
          Vec b = random_vec(rng, L.rank_B(), 2);
          CHECK(e.inverse() * L.image(b) * e == L.image(b));
        }
      }
  }
}

TEST_CASE("lifts and group structure") {
  Multiplier L2 = level2_multiplier();
  auto k = gamma_lift(L2, {0});
  REQUIRE(k.size() == 2);
  CHECK(k[0].xi == TorusPoint::identity(1));
  CHECK(k[1].xi == TorusPoint({cst(-1)}));
  auto l = gamma_lift(L2, {1});
  REQUIRE(l.size() == 2);
  CHECK(l[0].xi == TorusPoint({qm(1)}));
  CHECK(l[1].xi == TorusPoint({qm(1) * cst(-1)}));

  SmallHeisStructure st = group_structure(L2);
  CHECK(st.kernel_orders == std::vector<int64_t>{2});
  CHECK(st.cosets == std::vector<Vec>{{0}, {1}});
  CHECK(st.quotient.invariant_factors() == std::vector<int64_t>{2});
  REQUIRE(st.duality.size() == 2);
  // gamma(-1) = (-1)^gamma
  CHECK(st.duality[0] == std::vector<long>{0, 0});
  CHECK(st.duality[1][0] == 0);
  CHECK(st.duality[1][1] == st.root_order / 2);
  CHECK(st.nondegenerate);

  SmallHeisStructure sj = group_structure(jacobi_multiplier());
  CHECK(sj.kernel_elements.size() == 1);
  CHECK(sj.cosets.size() == 1);
  CHECK(sj.nondegenerate);

  std::mt19937 rng(3);
  for (const auto& L : random_cyclo_multipliers(rng, 9)) {
    SmallHeisStructure s = group_structure(L);
    CHECK(static_cast<int64_t>(s.kernel_elements.size()) == *L.quotient().index());
    CHECK(s.nondegenerate);
    for (const auto& kap : s.kernel_elements)
      for (const auto& im : L.images()) CHECK(kap.eval(im.h_l()).is_one());
  }

  // index 3 needs cube roots of unity
  QuantParam P = QuantParam::trivial(1);
  Multiplier L3(P, {HeisElement(P, qm(3), TorusPoint({qm(2)}), {3})});
  try {
    group_structure(L3);
    FAIL("expected MissingRootsOfUnity");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::MissingRootsOfUnity);
    CHECK(std::string(err.what()).find("order 3") != std::string::npos);
  }
  QuantParam P3 = QuantParam::trivial(1, CycloField::get(3));
  Multiplier L3b(P3, {HeisElement(P3, qm(3), TorusPoint({qm(2)}), {3})});
  CHECK(group_structure(L3b).kernel_elements.size() == 3);
  CHECK(group_structure(L3b).nondegenerate);

  try {
    gamma_lift(Multiplier(P, {HeisElement::identity(P)}), {0});
    FAIL("expected InfiniteIndex");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::InfiniteIndex);
  }
}

TEST_CASE("printed lift equation") {
  // dropping the period factor gives xi^2 = 1 over gamma = h0, which does not normalize
  Multiplier L2 = level2_multiplier();
  auto lit = gamma_lift(L2, {1}, LiftEquation::Literal);
  REQUIRE(lit.size() == 2);
  for (const auto& g : lit) CHECK(!normalizer_membership(L2, g));
  // over gamma = 0 the two readings agree
  auto a = gamma_lift(L2, {0}, LiftEquation::Literal), b = gamma_lift(L2, {0});
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].xi == b[i].xi);
}

TEST_CASE("lifting cocycle") {
  Multiplier L2 = level2_multiplier();
  auto cyc = lifting_cocycle(L2);
  CHECK(cyc.size() == 4);
  std::mt19937 rng(4);
  auto Ls = random_cyclo_multipliers(rng, 4);
  Ls.push_back(L2);
  for (const auto& L : Ls)
    for (const auto& e : lifting_cocycle(L)) {
      for (const auto& im : L.images()) CHECK(e.kappa.eval(im.h_l()).is_one());
      CHECK(L.quotient().reduce(vec_add(e.g1, e.g2)) == e.g3);
    }
}

TEST_CASE("action on the theta space") {
  Multiplier L2 = level2_multiplier();
  ThetaBasis tb = theta_dim_basis(L2);
  auto id = act_on_theta({UnitMonomial(), TorusPoint::identity(1), {0}}, tb, 6, 60);
  CHECK(id[0][0] == Series(Cyclo(1), 60));
  CHECK(id[1][1] == Series(Cyclo(1), 60));
  CHECK(id[0][1].is_zero());
  CHECK(id[1][0].is_zero());

  auto kap = act_on_theta({UnitMonomial(), TorusPoint({cst(-1)}), {0}}, tb, 6, 60);
  CHECK(kap[0][0] == Series(Cyclo(1), 60));
  CHECK(kap[1][1] == Series(Cyclo(-1), 60));
  CHECK(kap[0][1].is_zero());
  CHECK(kap[1][0].is_zero());

  auto lift = gamma_lift(L2, {1}).front();
  auto sw = act_on_theta(lift, tb, 6, 60);
  CHECK(sw[0][0].is_zero());
  CHECK(sw[1][1].is_zero());
  CHECK(sw[0][1].terms().size() == 1);
  CHECK(sw[1][0].terms().size() == 1);

  CharacterSplit cs = character_split(L2, tb, 6, 60);
  CHECK(cs.labels == std::vector<Vec>{{0}, {1}});
  long M = L2.param().field().root_order();
  CHECK(cs.characters[0] == std::vector<long>{0});
  CHECK(cs.characters[1] == std::vector<long>{M / 2});

  CHECK(commutant_dimension({kap, sw}) == 1);
  CHECK(commutant_dimension({kap}) == 2);
  CHECK(commutant_dimension({id}) == 4);

  try {
    act_on_theta({UnitMonomial(), TorusPoint({qm(2)}), {1}}, tb, 4, 40);
    FAIL("expected NotInNormalizer");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::NotInNormalizer);
  }

  ThetaBasis tj = theta_dim_basis(jacobi_multiplier());
  CharacterSplit cj = character_split(jacobi_multiplier(), tj, 4, 40);
  CHECK(cj.labels.size() == 1);
  CHECK(cj.characters[0].empty());
}

TEST_CASE("representation law and irreducibility") {
  std::mt19937 rng(5);
  auto Ls = random_cyclo_multipliers(rng, 6);
  Ls.push_back(level2_multiplier());
  for (const auto& L : Ls) {
    ThetaBasis tb = theta_dim_basis(L);
    int d = L.param().rank();
    QuotientData Q = L.quotient();
    std::vector<SmallHeisElement> elems;
    for (const auto& g : Q.coset_reps()) {
      auto ls = gamma_lift(L, g);
      elems.push_back(ls.front());
      elems.push_back(ls.back());
    }
    std::vector<SeriesMatrix> mats;
    for (const auto& g : elems) mats.push_back(act_on_theta(g, tb, 2, 40));
    CHECK(commutant_dimension(mats) == 1);
    for (int t = 0; t < 4; ++t) {
      const auto& a = elems[rng() % elems.size()];
      const auto& b = elems[rng() % elems.size()];
      HeisElement ab = a.element(L.param()) * b.element(L.param());
      auto mab = act_on_theta(as_small(ab), tb, 2, 40);
      auto ma = act_on_theta(a, tb, 2, 40), mb = act_on_theta(b, tb, 2, 40);
      CHECK(same_matrix(mab, matmul(ma, mb)));
    }
    (void)d;
  }

  // dim below the index
  QuantParam P = QuantParam::trivial(1);
  Multiplier bad(P, {level2_multiplier().images()[0], HeisElement(P, cst(-1), TorusPoint::identity(1), {0})});
  ThetaBasis partial = theta_dim_basis(bad, false);
  CHECK(partial.dim == 0);
  try {
    character_split(bad, partial, 2, 20);
    FAIL("expected DimensionDeficit");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::DimensionDeficit);
  }
}

TEST_CASE("Mumford pullback of thetas") {
  Multiplier J = jacobi_multiplier();
  auto th = theta_dim_basis(J).basis[0];
  MumfordResult r = mumford_theta_pullback(J, th, th, 4, 80);
  CHECK(r.report.ok);
  // theta(zw) theta(z/w): q^{k1^2 + k2^2} sits at (k1 + k2, k1 - k2)
  for (const Vec& k : window_points(2, 2))
    CHECK(r.series.coeff({k[0] + k[1], k[0] - k[1]}, 200) == Series(qm(k[0] * k[0] + k[1] * k[1])).truncated(200));
  CHECK(r.series.coeff({1, 0}, 200).is_zero());
  // at (0,0) only k = 0 contributes: a_0 a_0
  CHECK(r.series.coeff({0, 0}, 200) == Series(Cyclo(1)).truncated(200));

  QuantParam bt(IntMatrix{{0, 1}, {-1, 0}}, IntMatrix(2, 2));
  MumfordResult tw = mumford_theta_pullback(J, th, th, 4, 80, bt);
  CHECK(tw.report.ok);
  CHECK(tw.series.param() == bt);
  WindowTable a = evaluate(r.series, 4, 80), b = evaluate(tw.series, 4, 80);
  REQUIRE(a.cells.size() == b.cells.size());
  for (size_t i = 0; i < a.cells.size(); ++i) CHECK(a.cells[i].second == b.cells[i].second);

  QuantParam P = J.param();
  Multiplier Jx(P, {HeisElement(P, qm(2), TorusPoint({qm(2)}), {1})});
  try {
    mumford_theta_pullback(Jx, th, th, 2, 20);
    FAIL("expected NotSymmetric");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::NotSymmetric);
  }
  Multiplier neg(P, {HeisElement(P, qm(-1), TorusPoint({qm(-2)}), {1})});
  try {
    mumford_theta_pullback(neg, th, th, 2, 20);
    FAIL("expected NotAmple");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::NotAmple);
  }
}
