#include "qtheta/small_heisenberg.hpp"

#include <atomic>
#include <sstream>

#include "qtheta/error.hpp"

namespace qtheta {

std::string SmallHeisElement::to_string() const {
  return "[" + c.to_string() + "; " + xi.to_string() + ", " + vec_string(gamma) + ", 0]";
}

namespace {

void check_injective(const Multiplier& L) {
  if (L.injective()) return;
  IntMatrix K = kernel_basis(L.h_minus());
  std::vector<Vec> vals;
  for (int k = 0; k < K.cols(); ++k) {
    TorusPoint x = L.x_l(K.col(k));
    if (x.is_identity()) fail(ErrorCode::NonInjectiveImage, "kernel vector " + vec_string(K.col(k)) + " of h^- has x_l = 1");
    vals.push_back(x.valuation_vector());
  }
  if (matrix_rank(IntMatrix::from_columns(L.param().rank(), vals)) < K.cols())
    fail(ErrorCode::NonInjectiveImage, "L(B) -> T(H,1) x H is not injective");
}

// Points xi with h_i(xi) = rhs_i for the columns h_i of H, through the Smith form of H^T.
struct PointSolver {
  IntMatrix H;
  SmithForm s;
  const QuantParam* p;

  PointSolver(const IntMatrix& h, const QuantParam& param) : H(h), s(smith_normal_form(h.transpose())), p(&param) {}

  std::optional<TorusPoint> particular(const std::vector<UnitMonomial>& rhs) const {
    int rows = H.cols(), d = H.rows();
    std::vector<UnitMonomial> w(rows);
    for (int k = 0; k < rows; ++k)
      for (int j = 0; j < rows; ++j)
        if (s.U.at(k, j) != 0) w[k] *= rhs[j].pow(s.U.at(k, j));
    std::vector<UnitMonomial> y(d);
    for (int k = 0; k < rows; ++k) {
      if (k < s.rank) {
        auto r = w[k].root(s.diagonal[k]);
        if (!r)
          fail(ErrorCode::Unrepresentable,
               "no " + std::to_string(s.diagonal[k]) + "-th root of " + w[k].to_string() + " in the monomial group");
        y[k] = *r;
      } else if (!w[k].is_one()) {
        return std::nullopt;
      }
    }
    return combine(y);
  }

  TorusPoint combine(const std::vector<UnitMonomial>& y) const {
    int d = H.rows();
    std::vector<UnitMonomial> out(d);
    for (int i = 0; i < d; ++i)
      for (int k = 0; k < d; ++k)
        if (s.V.at(i, k) != 0) out[i] *= y[k].pow(s.V.at(i, k));
    return TorusPoint(out);
  }

  void kernel(std::vector<TorusPoint>& gens, std::vector<int64_t>& orders) const {
    const CycloField& F = p->field();
    long M = F.root_order();
    int d = H.rows();
    for (int k = 0; k < s.rank; ++k) {
      int64_t n = s.diagonal[k];
      if (n == 1) continue;
      if (M % n != 0)
        fail(ErrorCode::MissingRootsOfUnity, "roots of unity of order " + std::to_string(n) +
                                                 " are needed; the cyclotomic order " + std::to_string(F.order()) +
                                                 " does not provide them");
      std::vector<UnitMonomial> y(d);
      y[k] = UnitMonomial(Cyclo::root_of_unity(F, M / n), 0);
      gens.push_back(combine(y));
      orders.push_back(n);
    }
  }
};

std::vector<TorusPoint> all_elements(int d, const std::vector<TorusPoint>& gens, const std::vector<int64_t>& orders) {
  std::vector<TorusPoint> out{TorusPoint::identity(d)};
  for (size_t g = 0; g < gens.size(); ++g) {
    std::vector<TorusPoint> next;
    for (int64_t a = 0; a < orders[g]; ++a)
      for (const auto& x : out) next.push_back(x * gens[g].pow(a));
    out = std::move(next);
  }
  return out;
}

std::optional<long> unit_root_log(const UnitMonomial& m) {
  if (m.uexp() != 0) return std::nullopt;
  return m.coeff().root_log();
}

std::vector<UnitMonomial> lift_rhs(const Multiplier& L, const Vec& gamma, LiftEquation eq) {
  std::vector<UnitMonomial> rhs;
  for (const auto& im : L.images()) {
    UnitMonomial v = L.param().alpha(im.h_l(), gamma).pow(2);
    if (eq == LiftEquation::Periods) v *= im.x_l().eval(gamma);
    rhs.push_back(v);
  }
  return rhs;
}

void require_finite(const Multiplier& L) {
  if (!L.quotient().finite()) fail(ErrorCode::InfiniteIndex, "h^-(B) has infinite index in H");
}

}  // namespace

bool normalizer_membership(const Multiplier& L, const SmallHeisElement& g) {
  int d = L.param().rank();
  if (g.xi.rank() != d || static_cast<int>(g.gamma.size()) != d)
    fail(ErrorCode::DimensionMismatch, "normalizer candidate on the wrong lattice");
  check_injective(L);
  for (const auto& im : L.images())
    if (g.xi.eval(im.h_l()) != im.x_l().eval(g.gamma) * L.param().alpha(im.h_l(), g.gamma).pow(2)) return false;
  return true;
}

bool normalizes_by_conjugation(const Multiplier& L, const SmallHeisElement& g) {
  HeisElement e = g.element(L.param());
  HeisElement inv = e.inverse();
  for (const auto& im : L.images())
    if (inv * im * e != im) return false;
  return true;
}

std::vector<SmallHeisElement> gamma_lift(const Multiplier& L, const Vec& gamma, LiftEquation eq) {
  require_finite(L);
  if (static_cast<int>(gamma.size()) != L.param().rank()) fail(ErrorCode::DimensionMismatch, "gamma on the wrong lattice");
  PointSolver ps(L.h_minus(), L.param());
  std::vector<TorusPoint> gens;
  std::vector<int64_t> orders;
  ps.kernel(gens, orders);
  auto xi0 = ps.particular(lift_rhs(L, gamma, eq));
  std::vector<SmallHeisElement> out;
  if (!xi0) return out;
  for (const auto& k : all_elements(L.param().rank(), gens, orders)) out.push_back({UnitMonomial(), *xi0 * k, gamma});
  return out;
}

SmallHeisStructure group_structure(const Multiplier& L) {
  require_finite(L);
  QuotientData Q = L.quotient();
  SmallHeisStructure st{L, Q, {}, {}, {}, Q.coset_reps(), {}, L.param().field().root_order(), false};
  PointSolver ps(L.h_minus(), L.param());
  ps.kernel(st.kernel_gens, st.kernel_orders);
  st.kernel_elements = all_elements(L.param().rank(), st.kernel_gens, st.kernel_orders);
  for (const auto& k : st.kernel_elements) {
    std::vector<long> row;
    for (const auto& g : st.cosets) {
      auto lg = unit_root_log(k.eval(g));
      if (!lg) fail(ErrorCode::InvalidArgument, "duality value is not a root of unity");
      row.push_back(*lg);
    }
    st.duality.push_back(row);
  }
  size_t n = st.kernel_elements.size();
  bool ok = n == st.cosets.size();
  for (size_t i = 1; ok && i < n; ++i) {
    bool any = false;
    for (long v : st.duality[i]) any = any || v % st.root_order != 0;
    ok = any;
  }
  for (size_t j = 1; ok && j < st.cosets.size(); ++j) {
    bool any = false;
    for (size_t i = 0; i < n; ++i) any = any || st.duality[i][j] % st.root_order != 0;
    ok = any;
  }
  st.nondegenerate = ok;
  return st;
}

std::vector<CocycleEntry> lifting_cocycle(const Multiplier& L) {
  require_finite(L);
  QuotientData Q = L.quotient();
  const QuantParam& p = L.param();
  std::vector<CocycleEntry> out;
  auto lift = [&](const Vec& g) {
    auto ls = gamma_lift(L, g);
    if (ls.empty()) fail(ErrorCode::Unrepresentable, "no lift over " + vec_string(g));
    return ls.front().element(p);
  };
  for (const auto& g1 : Q.coset_reps())
    for (const auto& g2 : Q.coset_reps()) {
      Vec g3 = Q.reduce(vec_add(g1, g2));
      auto b = solve_integer(L.h_minus(), vec_sub(vec_add(g1, g2), g3));
      if (!b) fail(ErrorCode::InvalidArgument, "coset arithmetic failed");
      HeisElement rest = lift(g1) * lift(g2) * (lift(g3) * L.image(*b)).inverse();
      if (!vec_is_zero(rest.h_l())) fail(ErrorCode::InvalidArgument, "lifting cocycle has an H-component");
      out.push_back({g1, g2, g3, rest.c_l(), rest.x_l()});
    }
  return out;
}

SeriesMatrix act_on_theta(const SmallHeisElement& g, const ThetaBasis& basis, int R, int64_t order, int jobs) {
  const Multiplier& L = basis.multiplier;
  if (!normalizer_membership(L, g)) fail(ErrorCode::NotInNormalizer, g.to_string() + " does not normalize L(B)");
  HeisElement e = g.element(L.param());
  int n = basis.dim;
  SeriesMatrix m(n, std::vector<Series>(n));
  std::vector<Vec> cells = window_points(L.param().rank(), R);
  for (int j = 0; j < n; ++j) {
    TorusSeries moved = e.act(basis.basis[j]);
    for (int i = 0; i < n; ++i) m[i][j] = moved.coeff(basis.cosets[i], order);
    std::atomic<bool> bad{false};
    for_each_cell(cells, jobs, [&](size_t c) {
      Series sum = Series::zero(order);
      for (int i = 0; i < n; ++i) sum += m[i][j] * basis.basis[i].coeff(cells[c], order);
      int64_t cmp = std::min(order, sum.order());
      if (!moved.coeff(cells[c], order).agrees_upto(sum, cmp)) bad = true;
    });
    if (bad) fail(ErrorCode::NotInNormalizer, g.to_string() + " moves a basis theta out of the span on the window");
  }
  return m;
}

CharacterSplit character_split(const Multiplier& L, const ThetaBasis& basis, int R, int64_t order) {
  if (basis.dim < basis.index)
    fail(ErrorCode::DimensionDeficit, "dim " + std::to_string(basis.dim) + " < index " + std::to_string(basis.index));
  SmallHeisStructure st = group_structure(L);
  CharacterSplit cs;
  cs.labels = basis.cosets;
  cs.characters.assign(basis.dim, {});
  int d = L.param().rank();
  for (const auto& k : st.kernel_gens) {
    SeriesMatrix m = act_on_theta({UnitMonomial(), k, Vec(d, 0)}, basis, R, order);
    for (int j = 0; j < basis.dim; ++j) {
      for (int i = 0; i < basis.dim; ++i)
        if (i != j && !m[i][j].is_zero()) fail(ErrorCode::InvalidArgument, "kernel element does not act diagonally");
      auto terms = m[j][j].terms();
      std::optional<long> lg;
      if (terms.size() == 1 && terms[0].first == 0) lg = terms[0].second.root_log();
      if (!lg) fail(ErrorCode::InvalidArgument, "kernel element acts by a non-root of unity");
      cs.characters[j].push_back(*lg);
    }
  }
  return cs;
}

int commutant_dimension(const std::vector<SeriesMatrix>& mats) {
  if (mats.empty()) return 0;
  int n = static_cast<int>(mats[0].size());
  // entries are monomials known to their order; read them as exact
  auto exact = [](const Series& s) {
    std::map<int64_t, Cyclo> t;
    for (const auto& [e, c] : s.terms()) t[e] = c;
    return Series::from_terms(t);
  };
  using Row = std::map<int, Series>;
  std::vector<Row> rows;
  auto var = [n](int a, int b) { return a * n + b; };
  for (const auto& M : mats)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        // (XM - MX)_{ab}
        Row r;
        for (int c = 0; c < n; ++c) {
          Series mcb = exact(M[c][b]), mac = exact(M[a][c]);
          if (!mcb.is_zero()) r[var(a, c)] += mcb;
          if (!mac.is_zero()) r[var(c, b)] -= mac;
        }
        for (auto it = r.begin(); it != r.end();) it = it->second.is_zero() ? r.erase(it) : std::next(it);
        if (!r.empty()) rows.push_back(r);
      }
  // fraction-free elimination over the Laurent polynomial ring
  int rank = 0;
  size_t next = 0;
  for (int col = 0; col < n * n && next < rows.size(); ++col) {
    size_t pr = rows.size();
    for (size_t r = next; r < rows.size(); ++r)
      if (rows[r].count(col)) {
        pr = r;
        break;
      }
    if (pr == rows.size()) continue;
    std::swap(rows[next], rows[pr]);
    Series piv = rows[next].at(col);
    for (size_t r = next + 1; r < rows.size(); ++r) {
      auto it = rows[r].find(col);
      if (it == rows[r].end()) continue;
      Series f = it->second;
      Row nr;
      for (const auto& [j, s] : rows[r]) nr[j] += piv * s;
      for (const auto& [j, s] : rows[next]) nr[j] -= f * s;
      for (auto jt = nr.begin(); jt != nr.end();) jt = jt->second.is_zero() ? nr.erase(jt) : std::next(jt);
      rows[r] = nr;
    }
    ++next;
    ++rank;
  }
  return n * n - rank;
}

MumfordResult mumford_theta_pullback(const Multiplier& L, const TorusSeries& th1, const TorusSeries& th2, int R,
                                     int64_t order, const std::optional<QuantParam>& twist_target, int jobs) {
  if (!is_symmetric(L)) fail(ErrorCode::NotSymmetric, "Mumford pullback needs a symmetric multiplier");
  if (!is_ample(L)) fail(ErrorCode::NotAmple, "Mumford pullback needs an ample multiplier");
  const QuantParam& p = L.param();
  int d = p.rank();
  IntMatrix I = IntMatrix::identity(d);
  IntMatrix f = I.hstack(I);
  {
    IntMatrix bottom = I.hstack(I.scaled(-1));
    std::vector<Vec> rows;
    for (int i = 0; i < d; ++i) rows.push_back(f.row(i));
    for (int i = 0; i < d; ++i) rows.push_back(bottom.row(i));
    f = IntMatrix::from_rows(rows, 2 * d);
  }
  Multiplier LL = boxtimes(L, L);
  TorusSeries th = external_product(th1, th2);
  std::optional<TorusMorphism> M;
  if (!twist_target) {
    if (!p.S().is_zero()) fail(ErrorCode::ParamMismatch, "alpha^2 has no signs; L's parameter is not a square");
    IntMatrix A(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        if (p.A().at(i, j) % 2 != 0) fail(ErrorCode::ParamMismatch, "L's parameter is not a square");
        A.at(i, j) = p.A().at(i, j) / 2;
      }
    M = TorusMorphism::mumford(QuantParam(A, IntMatrix(d, d), p.field()));
  } else {
    const QuantParam& bt = *twist_target;
    if (bt.rank() != 2 * d) fail(ErrorCode::LatticeMismatch, "twist target must live on H + H");
    IntMatrix As = f.transpose() * bt.A() * f, Ss = f.transpose() * bt.S() * f;
    for (int i = 0; i < 2 * d; ++i)
      for (int j = 0; j < 2 * d; ++j) Ss.at(i, j) = ((Ss.at(i, j) % 2) + 2) % 2;
    QuantParam src(As, Ss, bt.field());
    LL = twist(LL, src);
    th = rename_param(th, src);
    M = TorusMorphism(f, TorusPoint::identity(2 * d), src, bt);
  }
  Multiplier ML = pullback(*M, LL);
  TorusSeries out = morphism_pullback(*M, th);
  MembershipReport rep = check_theta(ML, out, R, order, jobs);
  return {out, ML, rep};
}

}  // namespace qtheta
