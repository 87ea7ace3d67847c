#include "qtheta/json_io.hpp"

#include <fstream>

#include "qtheta/error.hpp"

namespace qtheta {

namespace {

[[noreturn]] void bad(const std::string& what) { fail(ErrorCode::ParseError, what); }

const Json& member(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing member '") + key + "'");
  return j.at(key);
}

Cyclo cyclo_from_json(const Json& j, const CycloField& F) {
  if (j.is_number_integer()) return Cyclo::from_strings(F, {std::to_string(j.get<long>())});
  if (j.is_string()) return Cyclo::from_strings(F, {j.get<std::string>()});
  if (!j.is_array()) bad("cyclotomic coefficient must be a list of rational strings");
  std::vector<std::string> parts;
  for (const auto& p : j) {
    if (p.is_string())
      parts.push_back(p.get<std::string>());
    else if (p.is_number_integer())
      parts.push_back(std::to_string(p.get<long>()));
    else
      bad("rational entries must be strings like \"p/q\"");
  }
  return Cyclo::from_strings(F, parts);
}

Json cyclo_json(const Cyclo& c) { return Json(c.to_strings()); }

}  // namespace

Json to_json(const UnitMonomial& m) { return Json::array({m.uexp(), cyclo_json(m.coeff())}); }

UnitMonomial unit_from_json(const Json& j, const CycloField& F) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer()) bad("unit monomial must be [uexp, coeffs]");
  Cyclo c = cyclo_from_json(j[1], F);
  if (c.is_zero()) bad("unit monomial with zero coefficient");
  return UnitMonomial(c, j[0].get<int64_t>());
}

Json to_json(const Series& s) {
  Json terms = Json::array();
  int m = 1;
  for (const auto& [e, c] : s.terms()) {
    m = c.field().order();
    terms.push_back(Json::array({e, cyclo_json(c)}));
  }
  Json out;
  out["m"] = m;
  out["N"] = s.is_exact() ? Json(nullptr) : Json(s.order());
  out["terms"] = terms;
  return out;
}

Series series_from_json(const Json& j, const CycloField& F) {
  const CycloField& G = j.contains("m") ? CycloField::get(member(j, "m").get<int>()) : F;
  int64_t N = kExact;
  if (j.contains("N") && !j["N"].is_null()) N = j["N"].get<int64_t>();
  std::map<int64_t, Cyclo> terms;
  for (const auto& t : member(j, "terms")) {
    if (!t.is_array() || t.size() != 2) bad("series term must be [uexp, coeffs]");
    Cyclo c = cyclo_from_json(t[1], G);
    auto [it, fresh] = terms.emplace(t[0].get<int64_t>(), c);
    if (!fresh) it->second += c;
  }
  return Series::from_terms(terms, N);
}

Json to_json(const IntMatrix& M) {
  Json out = Json::array();
  for (int i = 0; i < M.rows(); ++i) out.push_back(M.row(i));
  return out;
}

Vec vec_from_json(const Json& j) {
  if (!j.is_array()) bad("expected an integer vector");
  Vec v;
  for (const auto& x : j) {
    if (!x.is_number_integer()) bad("expected an integer vector");
    v.push_back(x.get<int64_t>());
  }
  return v;
}

IntMatrix matrix_from_json(const Json& j) {
  if (!j.is_array()) bad("expected a matrix as a list of rows");
  std::vector<Vec> rows;
  for (const auto& r : j) rows.push_back(vec_from_json(r));
  int cols = rows.empty() ? 0 : static_cast<int>(rows[0].size());
  for (const auto& r : rows)
    if (static_cast<int>(r.size()) != cols) bad("ragged matrix");
  return IntMatrix::from_rows(rows, cols);
}

Json to_json(const TorusPoint& x) {
  Json out = Json::array();
  for (const auto& v : x.values()) out.push_back(to_json(v));
  return out;
}

TorusPoint point_from_json(const Json& j, const CycloField& F) {
  if (!j.is_array()) bad("a torus point is a list of unit monomials");
  std::vector<UnitMonomial> v;
  for (const auto& x : j) v.push_back(unit_from_json(x, F));
  return TorusPoint(v);
}

Json to_json(const QuantParam& p) {
  Json out;
  out["A"] = to_json(p.A());
  out["S"] = to_json(p.S());
  return out;
}

QuantParam param_from_json(const Json& j, const CycloField& F) {
  IntMatrix A = matrix_from_json(member(j, "A"));
  IntMatrix S = j.contains("S") ? matrix_from_json(j["S"]) : IntMatrix(A.rows(), A.rows());
  return QuantParam(A, S, F);
}

Json to_json(const HeisElement& a) {
  Json out;
  out["c"] = to_json(a.c_l());
  out["x"] = to_json(a.x_l());
  out["h_l"] = a.h_l();
  return out;
}

HeisElement element_from_json(const Json& j, const QuantParam& p) {
  TorusPoint x = point_from_json(member(j, "x"), p.field());
  Vec h = vec_from_json(member(j, "h_l"));
  if (x.rank() != p.rank() || static_cast<int>(h.size()) != p.rank())
    bad("Heisenberg element does not match the lattice rank " + std::to_string(p.rank()));
  return HeisElement(p, unit_from_json(member(j, "c"), p.field()), x, h);
}

Json to_json(const HeisRaw& a) {
  Json out;
  out["c"] = to_json(a.c);
  out["x"] = to_json(a.x);
  out["g"] = a.g;
  out["h"] = a.h;
  return out;
}

HeisRaw raw_from_json(const Json& j, const CycloField& F) {
  HeisRaw a{unit_from_json(member(j, "c"), F), point_from_json(member(j, "x"), F), vec_from_json(member(j, "g")),
            vec_from_json(member(j, "h"))};
  return a;
}

Json to_json(const Multiplier& L) {
  Json out;
  out["param"] = to_json(L.param());
  out["B_rank"] = L.rank_B();
  Json ims = Json::array();
  for (const auto& a : L.images()) ims.push_back(to_json(a));
  out["images"] = ims;
  if (L.has_sqrt()) {
    Json s = Json::array();
    for (const auto& row : L.sqrt_pairing()) {
      Json r = Json::array();
      for (const auto& v : row) r.push_back(to_json(v));
      s.push_back(r);
    }
    out["sqrt"] = s;
  }
  return out;
}

Multiplier multiplier_from_json(const Json& j, const CycloField& F0) {
  const CycloField& F = j.contains("m") ? CycloField::get(j["m"].get<int>()) : F0;
  QuantParam p = param_from_json(member(j, "param"), F);
  std::vector<HeisElement> ims;
  for (const auto& a : member(j, "images")) ims.push_back(element_from_json(a, p));
  if (j.contains("B_rank") && j["B_rank"].get<int>() != static_cast<int>(ims.size()))
    bad("B_rank does not match the number of images");
  std::optional<PairingMatrix> sq;
  if (j.contains("sqrt") && !j["sqrt"].is_null()) {
    PairingMatrix s;
    for (const auto& row : j["sqrt"]) {
      std::vector<UnitMonomial> r;
      for (const auto& v : row) r.push_back(unit_from_json(v, F));
      s.push_back(r);
    }
    sq = s;
  }
  return Multiplier(p, ims, sq);
}

namespace {

Json factor_json(const Factor& f) {
  Json out;
  switch (f.kind) {
    case Factor::Kind::Series: {
      out["series"] = f.ref.name;
      Json dirs = Json::array();
      for (const auto& d : f.ref.dirs) dirs.push_back(d);
      out["dirs"] = dirs;
      if (f.ref.inner) out["inner"] = to_json(*f.ref.inner);
      break;
    }
    case Factor::Kind::Monomial:
      out["monomial"] = f.h;
      out["c"] = to_json(f.c);
      break;
    case Factor::Kind::Act:
      out["act"] = to_json(f.act);
      break;
  }
  return out;
}

Factor factor_from_json(const Json& j, const CycloField& F) {
  if (j.contains("series")) {
    std::vector<Vec> dirs;
    if (j.contains("dirs"))
      for (const auto& d : j["dirs"]) dirs.push_back(vec_from_json(d));
    Factor f = Factor::series(j["series"].get<std::string>(), dirs);
    if (j.contains("inner")) f.ref.inner = param_from_json(j["inner"], F);
    return f;
  }
  if (j.contains("monomial"))
    return Factor::monomial(vec_from_json(j["monomial"]), j.contains("c") ? unit_from_json(j["c"], F) : UnitMonomial());
  if (j.contains("act")) return Factor::action(raw_from_json(j["act"], F));
  bad("a word factor needs one of 'series', 'monomial', 'act'");
}

}  // namespace

Json to_json(const EquationSpec& s) {
  Json out;
  out["label"] = s.label;
  out["param"] = to_json(s.param);
  out["window"] = s.window;
  out["order"] = s.order;
  out["mode"] = to_string(s.mode);
  Json terms = Json::array();
  for (const auto& t : s.terms) {
    Json w = Json::array();
    for (const auto& f : t.word) w.push_back(factor_json(f));
    Json tj;
    tj["coeff"] = to_json(t.coeff);
    tj["word"] = w;
    terms.push_back(tj);
  }
  out["terms"] = terms;
  return out;
}

EquationSpec spec_from_json(const Json& j, const CycloField& F0) {
  const CycloField& F = j.contains("m") ? CycloField::get(j["m"].get<int>()) : F0;
  EquationSpec s;
  s.label = j.value("label", std::string("custom"));
  s.param = param_from_json(member(j, "param"), F);
  s.window = j.value("window", s.window);
  s.order = j.value("order", s.order);
  std::string mode = j.value("mode", std::string("product_identity"));
  if (mode == "operator_equation")
    s.mode = EquationMode::OperatorEquation;
  else if (mode == "product_identity")
    s.mode = EquationMode::ProductIdentity;
  else
    bad("unknown mode '" + mode + "'");
  for (const auto& t : member(j, "terms")) {
    Term term;
    if (t.contains("coeff")) {
      const Json& c = t["coeff"];
      term.coeff = c.is_object() ? series_from_json(c, F) : Series(unit_from_json(c, F));
    }
    for (const auto& f : member(t, "word")) term.word.push_back(factor_from_json(f, F));
    s.terms.push_back(std::move(term));
  }
  return s;
}

Json to_json(const WindowTable& t, int lattice) {
  Json out;
  out["lattice"] = lattice;
  out["window"] = t.R;
  out["order"] = t.order;
  out["exponent_unit"] = "u = q^(1/2)";
  Json cells = Json::array();
  for (const auto& [h, s] : t.cells) {
    if (s.is_zero()) continue;
    cells.push_back(Json::array({h, to_json(s)}));
  }
  out["coeffs"] = cells;
  return out;
}

Json to_json(const SeriesMatrix& m) {
  Json out = Json::array();
  for (const auto& row : m) {
    Json r = Json::array();
    for (const auto& s : row) r.push_back(to_json(s));
    out.push_back(r);
  }
  return out;
}

Json structure_report(const SmallHeisStructure& s) {
  Json out;
  Json gens = Json::array();
  for (const auto& k : s.kernel_gens) gens.push_back(to_json(k));
  out["generators"] = gens;
  out["orders"] = s.kernel_orders;
  out["cosets"] = s.cosets;
  out["root_order"] = s.root_order;
  out["duality"] = s.duality;
  out["nondegenerate"] = s.nondegenerate;
  return out;
}

Json report_json(const VerifyReport& r) {
  Json out;
  out["schema"] = 1;
  out["identity"] = r.identity;
  out["window"] = r.window;
  out["order"] = r.order;
  out["cells_checked"] = r.cells_checked;
  out["status"] = r.pass ? "pass" : "fail";
  if (r.first_mismatch) {
    Json m;
    m["equation"] = r.first_mismatch->equation;
    m["h"] = r.first_mismatch->h;
    m["uexp"] = r.first_mismatch->uexp;
    m["value"] = r.first_mismatch->value;
    out["first_mismatch"] = m;
  }
  return out;
}

std::string emit_report(const VerifyReport& r) { return report_json(r).dump(2) + "\n"; }

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    bad(path + ": " + e.what());
  }
}

}  // namespace qtheta
