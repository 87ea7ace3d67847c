#include <random>

#include "doctest.h"
#include "qtheta/error.hpp"
#include "qtheta/lattice.hpp"

using namespace qtheta;

namespace {

bool snf_ok(const IntMatrix& M, const SmithForm& s) {
  if (s.U * M * s.V != s.D) return false;
  if (std::llabs(determinant(s.U)) != 1 || std::llabs(determinant(s.V)) != 1) return false;
  for (size_t i = 0; i + 1 < s.diagonal.size(); ++i)
    if (s.diagonal[i + 1] % s.diagonal[i] != 0) return false;
  return true;
}

// row/column reduction done by hand for the fixed cases
IntMatrix diag(std::initializer_list<int64_t> d, int rows, int cols) {
  IntMatrix M(rows, cols);
  int i = 0;
  for (auto v : d) M.at(i, i) = v, ++i;
  return M;
}

}  // namespace

TEST_CASE("smith normal form examples") {
  auto s = smith_normal_form(diag({2, 3}, 2, 2));
  CHECK(s.D == diag({1, 6}, 2, 2));
  CHECK(snf_ok(diag({2, 3}, 2, 2), s));

  auto id = smith_normal_form(IntMatrix::identity(3));
  CHECK(id.D == IntMatrix::identity(3));

  IntMatrix M{{2, 4}, {0, 0}};
  auto t = smith_normal_form(M);
  CHECK(t.D == diag({2, 0}, 2, 2));
  CHECK(t.rank == 1);
}

TEST_CASE("smith normal form on random matrices") {
  std::mt19937 rng(1);
  std::uniform_int_distribution<int64_t> e(-6, 6);
  std::uniform_int_distribution<int> sz(1, 4);
  for (int t = 0; t < 200; ++t) {
    int r = sz(rng), c = sz(rng);
    IntMatrix M(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) M.at(i, j) = e(rng);
    auto s = smith_normal_form(M);
    CHECK(snf_ok(M, s));
    CHECK(s.rank == matrix_rank(M));
  }
}

TEST_CASE("quotient data") {
  QuotientData q(1, IntMatrix{{2}});
  CHECK(q.finite());
  CHECK(*q.index() == 2);
  CHECK(q.coset_reps() == std::vector<Vec>{{0}, {1}});
  CHECK(q.projection({5}) == 1);
  CHECK(q.projection({-4}) == 0);

  QuotientData inf(2, IntMatrix{{1}, {0}});
  CHECK_FALSE(inf.finite());
  CHECK_FALSE(inf.index());

  QuotientData six(2, IntMatrix::from_columns(2, {{2, 0}, {1, 3}}));
  CHECK(*six.index() == 6);
  CHECK(six.coset_reps().size() == 6);
}

TEST_CASE("quotient reps are incongruent and exhaustive") {
  std::mt19937 rng(2);
  std::uniform_int_distribution<int64_t> e(-4, 4);
  for (int t = 0; t < 60; ++t) {
    IntMatrix M(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) M.at(i, j) = e(rng);
    int64_t det = determinant(M);
    if (det == 0) continue;
    QuotientData q(2, M);
    REQUIRE(q.index());
    CHECK(*q.index() == std::llabs(det));
    const auto& reps = q.coset_reps();
    CHECK(static_cast<int64_t>(reps.size()) == std::llabs(det));
    for (size_t i = 0; i < reps.size(); ++i) {
      CHECK(q.projection(reps[i]) == static_cast<int>(i));
      // shifting by an image vector keeps the coset
      Vec moved = vec_add(reps[i], M.apply({e(rng), e(rng)}));
      CHECK(q.reduce(moved) == reps[i]);
    }
  }
}

TEST_CASE("positive definiteness") {
  auto R = [](std::initializer_list<std::initializer_list<long>> rows) {
    RatMatrix m;
    for (auto r : rows) {
      m.emplace_back();
      for (auto v : r) m.back().emplace_back(v);
    }
    return m;
  };
  CHECK(is_positive_definite(R({{4, 0}, {0, 4}})));
  CHECK_FALSE(is_positive_definite(R({{0, 1}, {1, 0}})));
  CHECK(is_positive_definite(R({{2, 1}, {1, 2}})));
  CHECK_THROWS_AS(is_positive_definite(R({{1, 2}, {0, 1}})), Error);
}

TEST_CASE("definiteness agrees with a box search") {
  std::mt19937 rng(4);
  std::uniform_int_distribution<long> e(-4, 4);
  for (int t = 0; t < 120; ++t) {
    int d = 2 + t % 2;
    RatMatrix Q(d, std::vector<mpq_class>(d));
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) Q[i][j] = Q[j][i] = mpq_class(e(rng), 1 + std::abs(e(rng)));
    bool pd = is_positive_definite(Q);
    // PD forces g^T Q g > 0 on every nonzero box point
    bool box_positive = true;
    std::vector<long> g(d, -5);
    for (;;) {
      bool zero = true;
      mpq_class v = 0;
      for (int i = 0; i < d; ++i) {
        if (g[i]) zero = false;
        for (int j = 0; j < d; ++j) v += Q[i][j] * g[i] * g[j];
      }
      if (!zero && v <= 0) box_positive = false;
      int i = d - 1;
      for (; i >= 0 && ++g[i] > 5; --i) g[i] = -5;
      if (i < 0) break;
    }
    if (pd) CHECK(box_positive);
  }
}

TEST_CASE("bilinear evaluation") {
  IntMatrix A{{0, 2}, {-2, 0}};
  CHECK(bilinear_eval(A, {1, 0}, {0, 1}) == 2);
  CHECK(bilinear_eval(A, {0, 0}, {3, 5}) == 0);
  CHECK(bilinear_eval(A, {3, -7}, {3, -7}) == 0);
  CHECK_THROWS_AS(bilinear_eval(A, {1}, {1, 2}), Error);
}

TEST_CASE("integer solving and kernels") {
  IntMatrix M{{2, 4}, {1, 3}};
  auto x = solve_integer(M, {6, 4});
  REQUIRE(x);
  CHECK(M.apply(*x) == Vec{6, 4});
  CHECK_FALSE(solve_integer(IntMatrix{{2}}, {3}));
  IntMatrix K = kernel_basis(IntMatrix{{1, 1, 1}});
  CHECK(K.cols() == 2);
  for (int j = 0; j < K.cols(); ++j) CHECK(vec_is_zero(IntMatrix{{1, 1, 1}}.apply(K.col(j))));
}
