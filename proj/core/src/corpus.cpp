#include "qtheta/corpus.hpp"

#include <algorithm>
#include <map>
#include <mutex>

#include "qtheta/error.hpp"

namespace qtheta {

namespace {

Series qpow(int64_t k) { return Series(UnitMonomial::u_power(2 * k)); }

// Largest k with 2k^2 <= N: beyond it e_q coefficients vanish to order N.
int64_t e_q_degree(int64_t N) {
  int64_t k = 0;
  while (2 * (k + 1) * (k + 1) <= N) ++k;
  return k;
}

// Shared caches keyed by the order they were computed to.
struct CoeffCache {
  std::mutex mu;
  std::map<int64_t, std::vector<Series>> by_order;

  template <class F>
  std::vector<Series> get(int64_t N, F make) {
    std::lock_guard<std::mutex> lock(mu);
    auto it = by_order.lower_bound(N);
    if (it != by_order.end()) {
      std::vector<Series> out;
      for (const auto& s : it->second) out.push_back(s.truncated(N));
      return out;
    }
    return by_order.emplace(N, make(N)).first->second;
  }
};

CoeffCache& product_cache() {
  static CoeffCache c;
  return c;
}
CoeffCache& inverse_cache() {
  static CoeffCache c;
  return c;
}

// b = 1 / a as power series in X, to degree K, coefficients exact to order N.
std::vector<Series> invert_power_series(const std::vector<Series>& a, int64_t K, int64_t N) {
  std::vector<Series> b{Series(Cyclo(1)).truncated(N)};
  Series a0inv = a.at(0).inverse(N);
  for (int64_t k = 1; k <= K; ++k) {
    Series s = Series::zero(N);
    for (int64_t i = 1; i <= k && i < static_cast<int64_t>(a.size()); ++i)
      s += Series::mul_upto(a[i], b[k - i], N);
    b.push_back(Series::mul_upto(-s, a0inv, N));
  }
  return b;
}

// n with h = n g, if any.
std::optional<int64_t> line_index(const Vec& g, const Vec& h) {
  std::optional<int64_t> n;
  for (size_t i = 0; i < g.size(); ++i) {
    if (g[i] == 0) {
      if (h[i] != 0) return std::nullopt;
      continue;
    }
    if (h[i] % g[i] != 0) return std::nullopt;
    int64_t m = h[i] / g[i];
    if (n && *n != m) return std::nullopt;
    n = m;
  }
  return n.value_or(0);
}

// e(g)^n = alpha(g,g)^{n(n-1)/2} e(ng): only the sign survives since A is antisymmetric.
UnitMonomial power_factor(const QuantParam& P, const Vec& g, int64_t n) {
  int64_t t = n * (n - 1) / 2;
  return UnitMonomial::sign((P.alpha_sign(g, g) < 0 && (t % 2 != 0)) ? -1 : 1);
}

void check_dirs(const QuantParam& P, const SeriesRef& ref, size_t count) {
  if (ref.dirs.size() != count)
    fail(ErrorCode::UnresolvedReference, ref.name + " needs " + std::to_string(count) + " lattice direction(s)");
  for (const auto& g : ref.dirs) {
    if (static_cast<int>(g.size()) != P.rank())
      fail(ErrorCode::UnresolvedReference, ref.name + ": direction " + vec_string(g) + " is not on a rank " +
                                               std::to_string(P.rank()) + " lattice");
    if (vec_is_zero(g)) fail(ErrorCode::UnresolvedReference, ref.name + ": zero direction");
  }
}

Certificate line_certificate(int d, const Vec& g, bool nonneg, const Quadratic& q) {
  return Certificate(d, {CertPiece{Vec(d, 0), IntMatrix::from_columns(d, {g}), {nonneg}, {q}}});
}

// sum_n s^n X^n-coefficients along g, where X^n -> e(g)^n; `coeffs(N)` lists them.
TorusSeries line_series(const QuantParam& P, const Vec& g, const UnitMonomial& s, bool nonneg, Quadratic bound,
                        std::function<std::vector<Series>(int64_t)> coeffs, int64_t (*degree)(int64_t),
                        std::string label) {
  bound.l[0] += s.uexp();
  int d = P.rank();
  auto rule = [P, g, s, nonneg, coeffs, degree](const Vec& h, int64_t N) -> Series {
    auto n = line_index(g, h);
    if (!n || (nonneg && *n < 0)) return Series::zero(N);
    UnitMonomial f = s.pow(*n) * power_factor(P, g, *n);
    int64_t M = N - f.uexp();
    if (M < 0) return Series::zero(N);
    int64_t k = nonneg ? *n : std::abs(*n);
    if (k > degree(M)) return Series::zero(N);
    auto a = coeffs(M);
    return a[k].times(f);
  };
  return TorusSeries::rule(P, SeriesKind::Proper, line_certificate(d, g, nonneg, bound), rule, std::move(label));
}

int64_t inverse_degree(int64_t N) { return std::max<int64_t>(0, N / 2); }
int64_t theta_degree(int64_t N) { return e_q_degree(N); }

std::vector<Series> theta_coefficients(int64_t N) {
  std::vector<Series> out;
  for (int64_t k = 0; 2 * k * k <= N; ++k) out.push_back(qpow(k * k).truncated(N));
  return out;
}

Quadratic one_dim(int64_t quad, int64_t lin) {
  Quadratic q = Quadratic::zero(1);
  q.P[0][0] = quad;
  q.l[0] = lin;
  return q;
}

TorusSeries theta_line(const QuantParam& P, const Vec& g, const UnitMonomial& s, const std::string& label) {
  return line_series(P, g, s, false, one_dim(2, 0), theta_coefficients, theta_degree, label);
}

TorusSeries e_q_line(const QuantParam& P, const Vec& g, const UnitMonomial& s, const std::string& label) {
  return line_series(P, g, s, true, one_dim(2, 0), e_q_coefficients, e_q_degree, label);
}

std::vector<Series> e_q_inverse_coefficients(int64_t N) {
  if (N < 0) return {Series::zero(N)};
  auto b = inverse_cache().get(N, [](int64_t M) {
    return invert_power_series(e_q_coefficients(M), inverse_degree(M), M);
  });
  b.resize(inverse_degree(N) + 1);
  return b;
}

TorusSeries e_q_inv_line(const QuantParam& P, const Vec& g, const UnitMonomial& s, const std::string& label) {
  // 1/e_q(X) = sum (-q)^k X^k / (q^2;q^2)_k: valuation exactly 2k in u
  return line_series(P, g, s, true, one_dim(0, 2), e_q_inverse_coefficients, inverse_degree, label);
}

// Normal-ordered coefficients of (e(g1) + e(g2))^{i+j} at i g1 + j g2, exact polynomials in u.
class BinomialTable {
 public:
  BinomialTable(QuantParam P, Vec g1, Vec g2) : P_(std::move(P)), g1_(std::move(g1)), g2_(std::move(g2)) {}
  Series at(int64_t i, int64_t j) {
    std::lock_guard<std::mutex> lock(mu_);
    return get(i, j);
  }

 private:
  Series get(int64_t i, int64_t j) {
    if (i < 0 || j < 0) return Series();
    if (i == 0 && j == 0) return Series(Cyclo(1));
    auto key = std::make_pair(i, j);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    Series s;
    if (i > 0) {
      Vec prev = vec_add(vec_scale(g1_, i - 1), vec_scale(g2_, j));
      s += get(i - 1, j).times(P_.alpha(prev, g1_));
    }
    if (j > 0) {
      Vec prev = vec_add(vec_scale(g1_, i), vec_scale(g2_, j - 1));
      s += get(i, j - 1).times(P_.alpha(prev, g2_));
    }
    return memo_.emplace(key, s).first->second;
  }
  QuantParam P_;
  Vec g1_, g2_;
  std::mutex mu_;
  std::map<std::pair<int64_t, int64_t>, Series> memo_;
};

TorusSeries e_q_sum(const QuantParam& P, const Vec& g1, const Vec& g2, const std::string& label) {
  int d = P.rank();
  IntMatrix G = IntMatrix::from_columns(d, {g1, g2});
  if (matrix_rank(G) != 2) fail(ErrorCode::UnresolvedReference, "e_q_sum needs independent directions");
  int64_t a = std::abs(P.alpha_uexp(g1, g2));
  Quadratic q = Quadratic::zero(2);
  q.P[0][0] = 2;
  q.P[1][1] = 2;
  q.P[0][1] = q.P[1][0] = mpq_class(4 - a, 2);
  auto table = std::make_shared<BinomialTable>(P, g1, g2);
  auto rule = [G, table](const Vec& h, int64_t N) -> Series {
    auto z = solve_integer(G, h);
    if (!z || (*z)[0] < 0 || (*z)[1] < 0) return Series::zero(N);
    Series c = table->at((*z)[0], (*z)[1]);
    int64_t k = (*z)[0] + (*z)[1];
    int64_t M = N - c.valuation_bound();
    if (M < 0 || k > e_q_degree(M)) return Series::zero(N);
    return Series::mul_upto(e_q_coefficients(M)[k], c, N);
  };
  Certificate cert(d, {CertPiece{Vec(d, 0), G, {true, true}, {q}}});
  return TorusSeries::rule(P, SeriesKind::Proper, cert, rule, label);
}

TorusSeries weinstein(const QuantParam& P, const QuantParam& inner) {
  int d = inner.rank();
  if (P.rank() != 2 * d || !P.is_trivial())
    fail(ErrorCode::UnresolvedReference, "theta_weinstein lives on the commutative torus of H + H");
  return TorusSeries::rule(
      P, SeriesKind::Formal, std::nullopt,
      [inner, d](const Vec& k, int64_t N) {
        Vec g(k.begin(), k.begin() + d), h(k.begin() + d, k.end());
        return Series(inner.alpha(g, h)).truncated(N);
      },
      "theta_W");
}

}  // namespace

std::vector<Series> e_q_coefficients(int64_t N) {
  if (N < 0) return {Series::zero(N)};
  auto a = product_cache().get(N, [](int64_t M) {
    int64_t K = e_q_degree(M);
    std::vector<Series> poly(K + 1, Series::zero(M));
    poly[0] = Series(Cyclo(1)).truncated(M);
    // multiply in (1 + q^{2n+1} X) while q^{2n+1} is visible at order M
    for (int64_t n = 0; 4 * n + 2 <= M; ++n) {
      UnitMonomial f = UnitMonomial::u_power(4 * n + 2);
      for (int64_t k = K; k >= 1; --k) poly[k] += poly[k - 1].times(f).truncated(M);
    }
    return poly;
  });
  a.resize(e_q_degree(N) + 1);
  return a;
}

std::vector<Series> e_q_coefficients_by_recurrence(int64_t N) {
  if (N < 0) return {Series::zero(N)};
  int64_t K = e_q_degree(N);
  std::vector<Series> a{Series(Cyclo(1)).truncated(N)};
  for (int64_t k = 1; k <= K; ++k) {
    Series denom = Series(Cyclo(1)) - qpow(2 * k);
    a.push_back(Series::mul_upto(a.back().times(UnitMonomial::u_power(4 * k - 2)), denom.inverse(N), N));
  }
  return a;
}

std::vector<std::string> builtin_names() {
  return {"theta_jacobi", "e_q", "e_q_inv", "e_q_sum", "r_fv", "theta_on_Tq_u", "theta_on_Tq_v", "theta_weinstein"};
}

NamedSeries builtin_series(const QuantParam& P, const SeriesRef& ref) {
  const std::string& n = ref.name;
  UnitMonomial one;
  auto default_dir = [&](SeriesRef r) {
    if (r.dirs.empty() && P.rank() == 1) r.dirs = {Vec{1}};
    return r;
  };
  if (n == "theta_jacobi") {
    SeriesRef r = default_dir(ref);
    check_dirs(P, r, 1);
    return {r, theta_line(P, r.dirs[0], one, "theta_q"), "Jacobi basic theta, sum q^{n^2} t^n"};
  }
  if (n == "e_q") {
    SeriesRef r = default_dir(ref);
    check_dirs(P, r, 1);
    return {r, e_q_line(P, r.dirs[0], one, "e_q"), "q-exponential prod_{n>=0}(1 + q^{2n+1} t)"};
  }
  if (n == "e_q_inv") {
    SeriesRef r = default_dir(ref);
    check_dirs(P, r, 1);
    return {r, e_q_inv_line(P, r.dirs[0], one, "1/e_q"), "power-series inverse of the q-exponential"};
  }
  if (n == "e_q_sum") {
    check_dirs(P, ref, 2);
    return {ref, e_q_sum(P, ref.dirs[0], ref.dirs[1], "e_q(sum)"), "q-exponential of e(g1) + e(g2)"};
  }
  if (n == "r_fv") {
    if (ref.dirs.size() != 2) fail(ErrorCode::UnresolvedReference, "r_fv needs directions [w, t]");
    check_dirs(P, {n, {ref.dirs[1]}, {}}, 1);
    if (static_cast<int>(ref.dirs[0].size()) != P.rank())
      fail(ErrorCode::UnresolvedReference, "r_fv: central direction has the wrong rank");
    const Vec& w = ref.dirs[0];
    const Vec& t = ref.dirs[1];
    // z t = alpha(w,t) e(w+t),  z t^{-1} = alpha(t,t) alpha(w,-t) e(w-t)
    UnitMonomial s_plus = P.alpha(w, t);
    UnitMonomial s_minus = P.alpha(t, t) * P.alpha(w, vec_neg(t));
    TorusSeries th = theta_line(P, t, one, "theta_q");
    TorusSeries d1 = e_q_inv_line(P, vec_add(w, t), s_plus, "1/e_q(zt)");
    TorusSeries d2 = e_q_inv_line(P, vec_sub(w, t), s_minus, "1/e_q(z/t)");
    return {ref, multiply(multiply(th, d2), d1), "theta_q(t) / (e_q(zt) e_q(z/t)), z = e(w) central"};
  }
  if (n == "theta_on_Tq_u" || n == "theta_on_Tq_v") {
    if (P.rank() != 2) fail(ErrorCode::UnresolvedReference, n + " lives on the rank 2 quantum torus");
    Vec g = n == "theta_on_Tq_u" ? Vec{1, 0} : Vec{0, 1};
    SeriesRef r{n, {g}, {}};
    return {r, theta_line(P, g, one, n == "theta_on_Tq_u" ? "theta_q(u)" : "theta_q(v)"),
            "basic theta lifted along a generator of T_q"};
  }
  if (n == "theta_weinstein") {
    if (!ref.inner) fail(ErrorCode::UnresolvedReference, "theta_weinstein needs the pairing alpha on H");
    return {ref, weinstein(P, *ref.inner), "formal theta sum alpha(g,h) e(g,h) on T(H + H, 1)"};
  }
  fail(ErrorCode::UnknownName, "no builtin series named '" + n + "'");
}

Factor Factor::series(std::string name, std::vector<Vec> dirs) {
  Factor f;
  f.kind = Kind::Series;
  f.ref = {std::move(name), std::move(dirs), {}};
  return f;
}

Factor Factor::monomial(Vec h, UnitMonomial c) {
  Factor f;
  f.kind = Kind::Monomial;
  f.h = std::move(h);
  f.c = c;
  return f;
}

Factor Factor::action(HeisRaw a) {
  Factor f;
  f.kind = Kind::Act;
  f.act = std::move(a);
  return f;
}

const char* to_string(EquationMode m) {
  return m == EquationMode::OperatorEquation ? "operator_equation" : "product_identity";
}

std::vector<TorusSeries> resolve_terms(const EquationSpec& spec) {
  const QuantParam& P = spec.param;
  const int d = P.rank();
  std::vector<TorusSeries> out;
  for (size_t t = 0; t < spec.terms.size(); ++t) {
    const auto& word = spec.terms[t].word;
    const std::string where = spec.label + " term " + std::to_string(t);
    if (word.empty()) fail(ErrorCode::UnresolvedReference, where + ": empty word");
    std::optional<TorusSeries> acc;
    int operands = 0;
    bool formal = false;
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
      switch (it->kind) {
        case Factor::Kind::Series: {
          TorusSeries s = builtin_series(P, it->ref).series;
          formal = formal || s.kind() == SeriesKind::Formal;
          ++operands;
          acc = acc ? multiply(s, *acc) : s;
          break;
        }
        case Factor::Kind::Monomial: {
          if (static_cast<int>(it->h.size()) != d)
            fail(ErrorCode::UnresolvedReference, where + ": monomial " + vec_string(it->h) + " off the lattice");
          TorusSeries m = TorusSeries::monomial(P, it->h, it->c);
          ++operands;
          acc = acc ? multiply(m, *acc) : m;
          break;
        }
        case Factor::Kind::Act: {
          const HeisRaw& a = it->act;
          if (a.x.rank() != d || static_cast<int>(a.g.size()) != d || static_cast<int>(a.h.size()) != d)
            fail(ErrorCode::UnresolvedReference, where + ": Heisenberg element off the lattice");
          if (!acc) fail(ErrorCode::UnresolvedReference, where + ": action with nothing to act on");
          acc = heis_act(P, a, *acc);
          break;
        }
      }
    }
    if (formal && (spec.mode == EquationMode::ProductIdentity || operands != 1))
      fail(ErrorCode::NotMultipliable, where + ": formal series may only be acted on, not multiplied");
    out.push_back(*acc);
  }
  return out;
}

VerifyReport verify_equation(const EquationSpec& spec, int jobs) {
  std::vector<TorusSeries> words = resolve_terms(spec);
  const int64_t Nu = 2 * spec.order;
  std::vector<Vec> cells = window_points(spec.param.rank(), spec.window);
  std::vector<std::optional<std::pair<int64_t, std::string>>> bad(cells.size());
  for_each_cell(cells, jobs, [&](size_t i) {
    Series sum = Series::zero(Nu);
    for (size_t t = 0; t < words.size(); ++t) {
      const Series& c = spec.terms[t].coeff;
      if (c.is_zero()) continue;
      Series w = words[t].coeff(cells[i], Nu - c.valuation_bound());
      sum += Series::mul_upto(c, w, Nu);
    }
    sum = sum.truncated(Nu);
    if (auto v = sum.valuation()) bad[i] = std::make_pair(*v, sum.coeff(*v).to_string());
  });
  VerifyReport r;
  r.identity = spec.label;
  r.window = spec.window;
  r.order = spec.order;
  r.cells_checked = static_cast<int64_t>(cells.size());
  r.equations = {spec.label};
  for (size_t i = 0; i < cells.size(); ++i)
    if (bad[i]) {
      r.pass = false;
      r.first_mismatch = CellMismatch{spec.label, cells[i], bad[i]->first, bad[i]->second};
      break;
    }
  return r;
}

namespace {

Series qs(int64_t k) { return qpow(k); }
Series minus_one() { return Series(Cyclo(-1)); }

Term term(Series c, std::vector<Factor> w) { return Term{std::move(c), std::move(w)}; }

EquationSpec eq(std::string label, QuantParam P, std::vector<Term> terms, int R, int64_t N, EquationMode mode) {
  return EquationSpec{std::move(label), std::move(P), std::move(terms), R, N, mode};
}

std::vector<EquationSpec> jacobi_family(const CycloField& F) {
  QuantParam P = QuantParam::trivial(1, F);
  std::vector<EquationSpec> out;
  for (int64_t m = -2; m <= 2; ++m) {
    // q^{m^2} t^m theta(q^{2m} t) - theta(t)
    HeisRaw a{UnitMonomial::u_power(2 * m * m), TorusPoint({UnitMonomial::u_power(4 * m)}), {m}, {0}};
    out.push_back(eq("E012 m=" + std::to_string(m), P,
                     {term(qs(0), {Factor::action(a), Factor::series("theta_jacobi")}),
                      term(minus_one(), {Factor::series("theta_jacobi")})},
                     8, 80, EquationMode::OperatorEquation));
  }
  return out;
}

HeisRaw dilation(int64_t uexp) {
  return HeisRaw{UnitMonomial(), TorusPoint({UnitMonomial::u_power(uexp)}), {0}, {0}};
}

std::vector<EquationSpec> q_exponential(const CycloField& F, bool printed) {
  QuantParam P = QuantParam::trivial(1, F);
  Factor e = Factor::series("e_q");
  std::vector<Term> terms;
  if (printed) {
    // e_q(q^2 t) - (1 + q t) e_q(t)
    terms = {term(qs(0), {Factor::action(dilation(4)), e}), term(minus_one(), {e}),
             term(-qs(1), {Factor::monomial({1}), e})};
  } else {
    // e_q(t) - (1 + q t) e_q(q^2 t)
    terms = {term(qs(0), {e}), term(minus_one(), {Factor::action(dilation(4)), e}),
             term(-qs(1), {Factor::monomial({1}), Factor::action(dilation(4)), e})};
  }
  return {eq(printed ? "E016" : "E016R", P, std::move(terms), 10, 40, EquationMode::OperatorEquation)};
}

Factor on_tq(const std::string& name, Vec g) { return Factor::series(name, {std::move(g)}); }

std::vector<EquationSpec> tq_identity(const CycloField& F, const std::string& id) {
  QuantParam P = QuantParam::quantum_torus(F);
  Vec u{1, 0}, v{0, 1};
  if (id == "E023")
    return {eq("E023", P,
               {term(qs(0), {on_tq("e_q", u), on_tq("e_q", v)}),
                term(minus_one(), {Factor::series("e_q_sum", {u, v})})},
               4, 16, EquationMode::ProductIdentity)};
  if (id == "E024")
    // q v u = e(h1 + h2)
    return {eq("E024", P,
               {term(qs(0), {on_tq("e_q", v), on_tq("e_q", u)}),
                term(minus_one(), {on_tq("e_q", u), on_tq("e_q", {1, 1}), on_tq("e_q", v)})},
               4, 16, EquationMode::ProductIdentity)};
  // E025
  Factor tu = Factor::series("theta_on_Tq_u"), tv = Factor::series("theta_on_Tq_v");
  return {eq("E025", P, {term(qs(0), {tu, tv, tu}), term(minus_one(), {tv, tu, tv})}, 5, 25,
             EquationMode::ProductIdentity)};
}

std::vector<EquationSpec> yang_baxter(const CycloField& F) {
  IntMatrix A(4, 4);
  A.at(0, 1) = 2;
  A.at(1, 0) = -2;
  QuantParam P(A, IntMatrix(4, 4), F);
  Vec u{1, 0, 0, 0}, v{0, 1, 0, 0}, z{0, 0, 1, 0}, zp{0, 0, 0, 1}, zzp{0, 0, 1, 1};
  auto r = [](Vec w, Vec t) { return Factor::series("r_fv", {std::move(w), std::move(t)}); };
  return {eq("E026", P,
             {term(qs(0), {r(z, u), r(zzp, v), r(zp, u)}), term(minus_one(), {r(zp, v), r(zzp, u), r(z, v)})},
             3, 12, EquationMode::ProductIdentity)};
}

std::vector<EquationSpec> hidden_periods_example(const CycloField& F) {
  QuantParam P = QuantParam::quantum_torus(F);
  Vec u{1, 0}, v{0, 1}, ui{-1, 0}, vi{0, -1};
  Factor tu = Factor::series("theta_on_Tq_u"), tv = Factor::series("theta_on_Tq_v");
  auto m = [](Vec h) { return Factor::monomial(std::move(h)); };
  const int R = 5;
  const int64_t N = 25;
  const auto mode = EquationMode::ProductIdentity;
  return {
      eq("E332 q u v^-1 th(u) v", P, {term(qs(1), {m(u), m(vi), tu, m(v)}), term(minus_one(), {tu})}, R, N, mode),
      eq("E332 u th(u) u^-1", P, {term(qs(0), {m(u), tu, m(ui)}), term(minus_one(), {tu})}, R, N, mode),
      eq("E332 q v u th(v) u^-1", P, {term(qs(1), {m(v), m(u), tv, m(ui)}), term(minus_one(), {tv})}, R, N, mode),
      eq("E332 v^-1 th(v) v", P, {term(qs(0), {m(vi), tv, m(v)}), term(minus_one(), {tv})}, R, N, mode),
      eq("E332 q u v^-1 th(u)th(v) v", P,
         {term(qs(1), {m(u), m(vi), tu, tv, m(v)}), term(minus_one(), {tu, tv})}, R, N, mode),
      eq("E332 q^-1 u th(u)th(v) v u^-1", P,
         {term(qs(-1), {m(u), tu, tv, m(v), m(ui)}), term(minus_one(), {tu, tv})}, R, N, mode),
  };
}

std::vector<EquationSpec> weinstein_family(const CycloField& F) {
  QuantParam inner = QuantParam::quantum_torus(F);
  const int d = inner.rank();
  QuantParam P = QuantParam::trivial(2 * d, F);
  Factor th = Factor::series("theta_weinstein");
  th.ref.inner = inner;
  std::vector<EquationSpec> out;
  for (const Vec& k : window_points(2 * d, 1)) {
    if (vec_is_zero(k)) continue;
    Vec g(k.begin(), k.begin() + d), h(k.begin() + d, k.end());
    // x_k(j) = <k,j>^2 = alpha(g, h') alpha(g', h) for j = (g', h')
    std::vector<UnitMonomial> x;
    for (int i = 0; i < 2 * d; ++i) {
      Vec e(2 * d, 0);
      e[i] = 1;
      Vec gp(e.begin(), e.begin() + d), hp(e.begin() + d, e.end());
      x.push_back(inner.alpha(g, hp) * inner.alpha(gp, h));
    }
    HeisRaw a{inner.alpha(g, h), TorusPoint(x), k, Vec(2 * d, 0)};
    out.push_back(eq("E313 k=" + vec_string(k), P,
                     {term(qs(0), {Factor::action(a), th}), term(minus_one(), {th})}, 4, 16,
                     EquationMode::OperatorEquation));
  }
  return out;
}

}  // namespace

std::vector<std::string> named_identities() {
  return {"E012", "E016", "E016R", "E023", "E024", "E025", "E026", "E332", "E313"};
}

std::vector<EquationSpec> named_equations(const std::string& id) {
  const CycloField& F = CycloField::get(1);
  if (id == "E012") return jacobi_family(F);
  if (id == "E016") return q_exponential(F, true);
  if (id == "E016R") return q_exponential(F, false);
  if (id == "E023" || id == "E024" || id == "E025") return tq_identity(F, id);
  if (id == "E026") return yang_baxter(F);
  if (id == "E332") return hidden_periods_example(F);
  if (id == "E313") return weinstein_family(F);
  fail(ErrorCode::UnknownName, "no registered identity '" + id + "'");
}

VerifyReport verify_all(const std::string& id, std::vector<EquationSpec> specs, std::optional<int> window,
                        std::optional<int64_t> order, int jobs) {
  VerifyReport r;
  r.identity = id;
  for (auto& s : specs) {
    if (window) s.window = *window;
    if (order) s.order = *order;
    VerifyReport one = verify_equation(s, jobs);
    r.window = std::max(r.window, one.window);
    r.order = std::max(r.order, one.order);
    r.cells_checked += one.cells_checked;
    r.equations.push_back(s.label);
    if (!one.pass && r.pass) {
      r.pass = false;
      r.first_mismatch = one.first_mismatch;
    }
  }
  return r;
}

VerifyReport verify_named(const std::string& id, std::optional<int> window, std::optional<int64_t> order, int jobs) {
  return verify_all(id, named_equations(id), window, order, jobs);
}

void corrupt(std::vector<EquationSpec>& specs) {
  if (specs.empty() || specs[0].terms.empty()) return;
  specs[0].terms[0].coeff = specs[0].terms[0].coeff.times(UnitMonomial::u_power(2));
}

}  // namespace qtheta
