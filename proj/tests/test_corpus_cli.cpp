#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "qtheta/error.hpp"
#include "qtheta/json_io.hpp"
#include "support.hpp"

using namespace qtheta;
using namespace testsupport;

namespace {

// integer polynomials in q, exponent -> coefficient
using QPoly = std::map<int64_t, long long>;

QPoly qmul(const QPoly& a, const QPoly& b, int64_t cap) {
  QPoly r;
  for (auto [e1, c1] : a)
    for (auto [e2, c2] : b)
      if (e1 + e2 <= cap) r[e1 + e2] += c1 * c2;
  return r;
}

Series to_series(const QPoly& p, int64_t order_u) {
  std::map<int64_t, Cyclo> m;
  for (auto [e, c] : p)
    if (c != 0 && 2 * e <= order_u) m[2 * e] = Cyclo(static_cast<long>(c));
  return Series::from_terms(m, order_u);
}

// Gaussian binomial [n, k]_{q^2} by the Pascal rule.
QPoly gauss_binomial(int64_t n, int64_t k) {
  if (k < 0 || k > n) return {};
  if (k == 0 || k == n) return {{0, 1}};
  QPoly a = gauss_binomial(n - 1, k - 1), b = gauss_binomial(n - 1, k);
  for (auto [e, c] : b) a[e + 2 * k] += c;
  return a;
}

// 1/(q^2;q^2)_k to q-order cap
QPoly inv_pochhammer(int64_t k, int64_t cap) {
  QPoly r{{0, 1}};
  for (int64_t j = 1; j <= k; ++j) {
    QPoly geo;
    for (int64_t e = 0; e <= cap; e += 2 * j) geo[e] = 1;
    r = qmul(r, geo, cap);
  }
  return r;
}

std::string samples(const std::string& f) { return std::string(QTHETA_SAMPLES_DIR) + "/" + f; }

int run_cli(std::vector<std::string> args, std::string* out = nullptr) {
  std::ostringstream o, e;
  int code = qtheta::cli::run(args, o, e);
  if (out) *out = o.str();
  return code;
}

}  // namespace

TEST_CASE("theta_jacobi coefficients are q^{n^2}") {
  auto th = builtin_series(QuantParam::trivial(1), {"theta_jacobi", {}, {}}).series;
  for (int64_t n = -6; n <= 6; ++n) CHECK(th.coeff({n}, 100) == qpow(n * n).truncated(100));
  CHECK(th.kind() == SeriesKind::Proper);
}

TEST_CASE("e_q to order q^7 in t-degree <= 2 matches the expanded finite product") {
  // independent expansion of prod_{n=0}^{3} (1 + q^{2n+1} t) as integer polynomials
  std::map<int, QPoly> prod{{0, {{0, 1}}}};
  for (int n = 0; n <= 3; ++n) {
    std::map<int, QPoly> next = prod;
    for (auto& [deg, p] : prod)
      for (auto [e, c] : p)
        if (e + 2 * n + 1 <= 7) next[deg + 1][e + 2 * n + 1] += c;
    prod = next;
  }
  auto eq = builtin_series(QuantParam::trivial(1), {"e_q", {}, {}}).series;
  for (int deg = 0; deg <= 2; ++deg) CHECK(eq.coeff({deg}, 14) == to_series(prod[deg], 14));
  CHECK(eq.coeff({1}, 14) == useries({{2, 1}, {6, 1}, {10, 1}, {14, 1}}, 14));
  CHECK(*eq.coeff({2}, 14).valuation() == 8);  // q^4 times a unit series
  CHECK(eq.coeff({-1}, 14).is_zero());
}

TEST_CASE("e_q from the product and from the functional equation agree") {
  for (int64_t N : {0, 7, 40, 123}) {
    auto a = e_q_coefficients(N), b = e_q_coefficients_by_recurrence(N);
    REQUIRE(a.size() == b.size());
    for (size_t k = 0; k < a.size(); ++k) CHECK(a[k] == b[k]);
  }
  // closed form q^{k^2} / (q^2;q^2)_k
  auto a = e_q_coefficients(60);
  for (int64_t k = 0; k < static_cast<int64_t>(a.size()); ++k)
    CHECK(a[k] == to_series(qmul({{k * k, 1}}, inv_pochhammer(k, 30), 30), 60));
}

TEST_CASE("registry determinism") {
  QuantParam P = QuantParam::quantum_torus();
  for (const std::string& name : {"e_q", "e_q_inv", "theta_jacobi"}) {
    auto s1 = builtin_series(P, {name, {{1, 1}}, {}}).series;
    auto s2 = builtin_series(P, {name, {{1, 1}}, {}}).series;
    for (const Vec& h : window_points(2, 3)) CHECK(s1.coeff(h, 30) == s2.coeff(h, 30));
  }
  auto a = builtin_series(P, {"e_q_sum", {{1, 0}, {0, 1}}, {}}).series;
  auto b = builtin_series(P, {"e_q_sum", {{1, 0}, {0, 1}}, {}}).series;
  for (const Vec& h : window_points(2, 3)) CHECK(a.coeff(h, 30) == b.coeff(h, 30));
}

TEST_CASE("1/e_q is the inverse along its line and has the q-binomial closed form") {
  QuantParam P = QuantParam::trivial(1);
  auto e = builtin_series(P, {"e_q", {}, {}}).series;
  auto inv = builtin_series(P, {"e_q_inv", {}, {}}).series;
  auto one = multiply(e, inv);
  for (int64_t n = -3; n <= 12; ++n) CHECK(one.coeff({n}, 40) == (n == 0 ? Series(Cyclo(1)) : Series()).truncated(40));
  // (-q)^k / (q^2;q^2)_k
  for (int64_t k = 0; k <= 10; ++k) {
    QPoly expect = qmul({{k, k % 2 ? -1 : 1}}, inv_pochhammer(k, 20), 20);
    CHECK(inv.coeff({k}, 40) == to_series(expect, 40));
  }
}

TEST_CASE("e_q(u + v) on T_q: a_{i+j} q^{-ij} [i+j, i]_{q^2}") {
  QuantParam P = QuantParam::quantum_torus();
  auto s = builtin_series(P, {"e_q_sum", {{1, 0}, {0, 1}}, {}}).series;
  const int64_t cap = 24;
  for (int64_t i = 0; i <= 3; ++i)
    for (int64_t j = 0; j <= 3; ++j) {
      int64_t k = i + j;
      QPoly a = qmul({{k * k, 1}}, inv_pochhammer(k, cap + 10), cap + 10);
      QPoly expect = qmul(qmul(a, gauss_binomial(k, i), cap + 10), {{-i * j, 1}}, cap);
      CHECK(s.coeff({i, j}, 2 * cap) == to_series(expect, 2 * cap));
    }
  CHECK(s.coeff({-1, 2}, 10).is_zero());
}

TEST_CASE("r_fv times the two q-exponentials gives theta back") {
  IntMatrix A(3, 3);
  QuantParam P(A, IntMatrix(3, 3));
  Vec w{0, 0, 1}, t{1, 0, 0};
  auto r = builtin_series(P, {"r_fv", {w, t}, {}}).series;
  auto e1 = builtin_series(P, {"e_q", {vec_add(w, t)}, {}}).series;
  auto e2 = builtin_series(P, {"e_q", {vec_sub(w, t)}, {}}).series;
  auto th = builtin_series(P, {"theta_jacobi", {t}, {}}).series;
  auto back = multiply(multiply(r, e1), e2);
  for (const Vec& h : window_points(3, 2)) CHECK(back.coeff(h, 16) == th.coeff(h, 16));
}

TEST_CASE("theta_weinstein: coefficient at (g,h) is alpha(g,h), formal kind") {
  QuantParam inner = QuantParam::quantum_torus();
  SeriesRef ref{"theta_weinstein", {}, inner};
  auto w = builtin_series(QuantParam::trivial(4), ref).series;
  CHECK(w.kind() == SeriesKind::Formal);
  for (const Vec& k : window_points(4, 2)) {
    Vec g{k[0], k[1]}, h{k[2], k[3]};
    CHECK(w.coeff(k, 20) == Series(inner.alpha(g, h)).truncated(20));
  }
  CHECK_THROWS_AS(builtin_series(QuantParam::quantum_torus(), ref), Error);
}

TEST_CASE("unknown builtin names and bad references") {
  QuantParam P = QuantParam::quantum_torus();
  try {
    builtin_series(P, {"theta_nope", {}, {}});
    FAIL("expected UnknownName");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownName);
  }
  try {
    builtin_series(P, {"e_q", {{1, 0, 0}}, {}});
    FAIL("expected UnresolvedReference");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnresolvedReference);
  }
  CHECK_THROWS_AS(named_equations("E999"), Error);
}

TEST_CASE("verify_equation: Jacobi functional equation for m = 1") {
  QuantParam P = QuantParam::trivial(1);
  HeisRaw a{UnitMonomial::u_power(2), TorusPoint({UnitMonomial::u_power(4)}), {1}, {0}};
  EquationSpec s{"m=1", P,
                 {Term{Series(Cyclo(1)), {Factor::action(a), Factor::series("theta_jacobi")}},
                  Term{Series(Cyclo(-1)), {Factor::series("theta_jacobi")}}},
                 8, 80, EquationMode::OperatorEquation};
  auto r = verify_equation(s);
  CHECK(r.pass);
  CHECK(r.cells_checked == 17);
  // a wrong constant is caught at the first cell with its exponent
  s.terms[0].coeff = Series(Cyclo(2));
  r = verify_equation(s);
  REQUIRE_FALSE(r.pass);
  CHECK(r.first_mismatch->h == Vec{-8});
  CHECK(r.first_mismatch->uexp == 128);
}

TEST_CASE("operand kinds: formal series are only acted on") {
  QuantParam inner = QuantParam::quantum_torus();
  QuantParam P = QuantParam::trivial(4);
  Factor w = Factor::series("theta_weinstein");
  w.ref.inner = inner;
  EquationSpec s{"bad", P, {Term{Series(Cyclo(1)), {w, Factor::monomial({1, 0, 0, 0})}}}, 1, 2,
                 EquationMode::OperatorEquation};
  try {
    resolve_terms(s);
    FAIL("expected NotMultipliable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotMultipliable);
  }
  s.terms = {Term{Series(Cyclo(1)), {w}}};
  s.mode = EquationMode::ProductIdentity;
  CHECK_THROWS_AS(resolve_terms(s), Error);
  s.mode = EquationMode::OperatorEquation;
  CHECK_NOTHROW(resolve_terms(s));
  s.terms = {Term{Series(Cyclo(1)), {}}};
  try {
    resolve_terms(s);
    FAIL("expected UnresolvedReference");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnresolvedReference);
  }
}

TEST_CASE("registered identities at their default budgets") {
  for (const auto& id : named_identities()) {
    auto r = verify_named(id);
    CAPTURE(id);
    if (id == "E016") {
      // the printed orientation fails; the product satisfies the reversed one
      CHECK_FALSE(r.pass);
      REQUIRE(r.first_mismatch);
      CHECK(r.first_mismatch->h == Vec{1});
    } else {
      CHECK(r.pass);
    }
    CHECK(r.cells_checked > 0);
  }
}

TEST_CASE("quantum exponential identities pass at every smaller budget") {
  for (const std::string id : {"E023", "E024"})
    for (int R = 0; R <= 4; ++R)
      for (int64_t N : {0, 3, 9, 16}) {
        CAPTURE(id);
        CAPTURE(R);
        CAPTURE(N);
        CHECK(verify_named(id, R, N).pass);
      }
}

TEST_CASE("corrupted registry entry fails with a located mismatch") {
  auto specs = named_equations("E025");
  corrupt(specs);
  auto r = verify_all("E025", specs, std::nullopt, 3, 1);
  CHECK_FALSE(r.pass);
  REQUIRE(r.first_mismatch);
  CHECK(r.first_mismatch->h.size() == 2);
  CHECK(r.first_mismatch->uexp <= 6);
  for (const std::string id : {"E023", "E026", "E332"}) {
    auto s = named_equations(id);
    corrupt(s);
    CAPTURE(id);
    CHECK_FALSE(verify_all(id, s, std::nullopt, std::nullopt, 1).pass);
  }
}

TEST_CASE("parallel verification gives the same report") {
  auto a = emit_report(verify_named("E025", 4, 12, 1));
  auto b = emit_report(verify_named("E025", 4, 12, 4));
  CHECK(a == b);
  auto c = emit_report(verify_named("E016", std::nullopt, std::nullopt, 3));
  CHECK(c == emit_report(verify_named("E016")));
}

TEST_CASE("report format") {
  auto pass = report_json(verify_named("E016R"));
  CHECK(pass["schema"] == 1);
  CHECK(pass["status"] == "pass");
  CHECK_FALSE(pass.contains("first_mismatch"));
  CHECK(pass["window"] == 10);
  CHECK(pass["order"] == 40);
  auto fail = report_json(verify_named("E016"));
  CHECK(fail["status"] == "fail");
  CHECK(fail["first_mismatch"]["h"] == Json::array({1}));
  CHECK(fail["first_mismatch"]["uexp"].is_number_integer());
  std::vector<std::string> keys;
  for (auto& [k, v] : fail.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"schema", "identity", "window", "order", "cells_checked", "status",
                                         "first_mismatch"});
}

TEST_CASE("JSON round trips") {
  const CycloField& F = CycloField::get(3);
  UnitMonomial m(Cyclo(F, {mpq_class(1, 2), mpq_class(-3)}), -5);
  CHECK(unit_from_json(to_json(m), F) == m);
  Series s = Series::from_terms({{-2, Cyclo(F, {mpq_class(2, 7)})}, {3, Cyclo::zeta_power(F, 1)}}, 9);
  CHECK(series_from_json(to_json(s), F) == s);
  CHECK(series_from_json(to_json(Series(Cyclo(1))), F) == Series(Cyclo(1)));

  QuantParam P = QuantParam::quantum_torus();
  HeisElement a(P, UnitMonomial::u_power(3), TorusPoint({UnitMonomial::u_power(2), UnitMonomial::sign(-1)}), {1, -2});
  CHECK(element_from_json(to_json(a), P) == a);

  Multiplier L = multiplier_from_json(read_json_file(samples("jacobi.json")), CycloField::get(1));
  Multiplier L2 = multiplier_from_json(to_json(L), CycloField::get(1));
  CHECK(L2.images() == L.images());
  CHECK(L2.sqrt_pairing() == L.sqrt_pairing());

  for (const auto& id : {"E012", "E016R", "E024", "E313"}) {
    auto specs = named_equations(id);
    EquationSpec back = spec_from_json(to_json(specs[0]), CycloField::get(1));
    CHECK(to_json(back) == to_json(specs[0]));
    CHECK(emit_report(verify_equation(back)) == emit_report(verify_equation(specs[0])));
  }
  CHECK_THROWS_AS(unit_from_json(Json::parse("[1]"), F), Error);
  CHECK_THROWS_AS(multiplier_from_json(Json::parse("{\"images\": []}"), F), Error);
}

TEST_CASE("cli: verify") {
  std::string out;
  CHECK(run_cli({"verify", "E016R"}, &out) == 0);
  CHECK(Json::parse(out)["status"] == "pass");
  CHECK(Json::parse(out)["cells_checked"] == 21);
  CHECK(run_cli({"verify", "E016"}, &out) == 1);
  CHECK(run_cli({"verify", "E025", "--order", "3", "--corrupt"}, &out) == 1);
  auto j = Json::parse(out);
  CHECK(j["status"] == "fail");
  CHECK(j["order"] == 3);
  CHECK(j["first_mismatch"].contains("h"));
  // byte-identical reruns
  std::string again;
  run_cli({"verify", "E025", "--order", "3", "--corrupt"}, &again);
  CHECK(again == out);

  auto tmp = std::filesystem::temp_directory_path() / "qtheta_spec.json";
  {
    std::ofstream f(tmp);
    f << to_json(named_equations("E012")[3]).dump();
  }
  CHECK(run_cli({"verify", tmp.string(), "--window", "4"}, &out) == 0);
  CHECK(Json::parse(out)["window"] == 4);
  auto rep = std::filesystem::temp_directory_path() / "qtheta_report.json";
  CHECK(run_cli({"--out", rep.string(), "--jobs", "2", "verify", "E023"}, &out) == 0);
  CHECK(out.empty());
  CHECK(read_json_file(rep.string())["status"] == "pass");
}

TEST_CASE("cli: usage errors exit 2") {
  CHECK(run_cli({}) == 2);
  CHECK(run_cli({"verify"}) == 2);
  CHECK(run_cli({"verify", "E999"}) == 2);
  CHECK(run_cli({"frobnicate"}) == 2);
  CHECK(run_cli({"theta", "/nonexistent.json"}) == 2);
  CHECK(run_cli({"--jobs", "0", "verify", "E016R"}) == 2);
  CHECK(run_cli({"--help"}) == 0);
}

TEST_CASE("cli: theta for the Jacobi multiplier") {
  std::string out;
  CHECK(run_cli({"theta", samples("jacobi.json"), "--window", "8", "--order", "80"}, &out) == 0);
  auto j = Json::parse(out);
  CHECK(j["dim"] == 1);
  CHECK(j["status"] == "pass");
  const auto& cells = j["basis"][0]["coeffs"];
  CHECK(cells.size() == 17);
  for (const auto& c : cells) {
    int64_t n = c[0][0];
    Series s = series_from_json(c[1], CycloField::get(1));
    CHECK(s == qpow(n * n).truncated(160));
  }
}

TEST_CASE("cli: compose, small-group, act") {
  std::string out;
  CHECK(run_cli({"compose", samples("jacobi.json"), samples("jacobi.json")}, &out) == 0);
  CHECK(Json::parse(out)["composable"] == true);
  CHECK(Json::parse(out)["multiplier"]["B_rank"] == 1);
  auto far = std::filesystem::temp_directory_path() / "qtheta_far.json";
  {
    std::ofstream f(far);
    f << R"({"param": {"A": [[0]]}, "images": [{"c": [2, ["1"]], "x": [[8, ["1"]]], "h_l": [1]}]})";
  }
  CHECK(run_cli({"compose", samples("jacobi.json"), far.string()}, &out) == 1);
  CHECK(Json::parse(out)["composable"] == false);
  CHECK(run_cli({"small-group", samples("level2.json"), "--window", "3", "--order", "9"}, &out) == 0);
  auto j = Json::parse(out);
  CHECK(j["dim"] == 2);
  CHECK(j["orders"] == Json::array({2}));
  CHECK(j["nondegenerate"] == true);
  CHECK(run_cli({"act", samples("shift_half.json"), samples("level2.json"), "--window", "3", "--order", "9"}, &out) == 0);
  CHECK(Json::parse(out)["matrix"].size() == 2);
  // [1; 1, h0, 0] does not normalize the level-2 multiplier
  auto tmp = std::filesystem::temp_directory_path() / "qtheta_elem.json";
  {
    std::ofstream f(tmp);
    f << R"({"c": [0, ["1"]], "x": [[0, ["1"]]], "h_l": [1]})";
  }
  CHECK(run_cli({"act", tmp.string(), samples("level2.json")}, &out) == 1);
  CHECK(Json::parse(out)["error"] == "NotInNormalizer");
}
