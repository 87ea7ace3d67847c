#pragma once

#include <json.hpp>

#include <string>

#include "qtheta/corpus.hpp"
#include "qtheta/multiplier.hpp"
#include "qtheta/small_heisenberg.hpp"

namespace qtheta {

using Json = nlohmann::ordered_json;

// Every reader raises ParseError on malformed input.  Cyclotomic coefficients are read in
// the field Q(zeta_m) passed in (or named by an "m" member where the format has one).

// UnitMonomial: [uexp, ["p/q", ...]]
Json to_json(const UnitMonomial& m);
UnitMonomial unit_from_json(const Json& j, const CycloField& F);
// ScalarSeries: {"m": m, "N": order or null when exact, "terms": [[uexp, [rationals]], ...]}
Json to_json(const Series& s);
Series series_from_json(const Json& j, const CycloField& F);
Json to_json(const IntMatrix& M);
IntMatrix matrix_from_json(const Json& j);
Vec vec_from_json(const Json& j);
Json to_json(const TorusPoint& x);
TorusPoint point_from_json(const Json& j, const CycloField& F);
// {"A": [[...]], "S": [[...]]}
Json to_json(const QuantParam& p);
QuantParam param_from_json(const Json& j, const CycloField& F);
// {"c": unit, "x": [unit...], "h_l": [int...]}; a "param" member is optional here.
Json to_json(const HeisElement& a);
HeisElement element_from_json(const Json& j, const QuantParam& p);
// {"c": unit, "x": [...], "g": [...], "h": [...]}
Json to_json(const HeisRaw& a);
HeisRaw raw_from_json(const Json& j, const CycloField& F);
// {"param": ..., "B_rank": r, "images": [...], "sqrt": [[unit...]...]}
Json to_json(const Multiplier& L);
Multiplier multiplier_from_json(const Json& j, const CycloField& F);
// {"label", "param", "window", "order", "mode", "terms": [{"coeff", "word": [factor...]}]}
// factor: {"series": name, "dirs": [[...]], "inner": param} | {"monomial": [...], "c": unit} | {"act": raw}
Json to_json(const EquationSpec& s);
EquationSpec spec_from_json(const Json& j, const CycloField& F);

// {"lattice": d, "window": R, "order": N, "coeffs": [[h, series], ...]}
Json to_json(const WindowTable& t, int lattice);
Json to_json(const SeriesMatrix& m);
Json structure_report(const SmallHeisStructure& s);

// {"schema": 1, "identity", "window", "order", "cells_checked", "status", "first_mismatch"?}
Json report_json(const VerifyReport& r);
std::string emit_report(const VerifyReport& r);

Json read_json_file(const std::string& path);

}  // namespace qtheta
