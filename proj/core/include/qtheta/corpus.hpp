#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qtheta/heisenberg.hpp"
#include "qtheta/torus_series.hpp"

namespace qtheta {

// A named series on a given torus.  `dirs` are lattice vectors fixing the lift:
//   theta_jacobi [g]       sum q^{n^2} e(g)^n
//   e_q [g]                prod_{n>=0} (1 + q^{2n+1} e(g))
//   e_q_inv [g]            1 / e_q(e(g)), by power-series inversion along g
//   e_q_sum [g1, g2]       e_q(e(g1) + e(g2))
//   r_fv [w, t]            theta(e(t)) / (e_q(e(w+t)) e_q(e(w-t)));  w is the central direction of z
//   theta_on_Tq_u, theta_on_Tq_v   theta_jacobi along h1, h2 of T_q
//   theta_weinstein        sum alpha(g,h) e(g,h) on T(H+H, 1); needs `inner` = alpha on H
struct SeriesRef {
  std::string name;
  std::vector<Vec> dirs;
  std::optional<QuantParam> inner;
};

struct NamedSeries {
  SeriesRef ref;
  TorusSeries series;
  std::string provenance;
};

std::vector<std::string> builtin_names();
NamedSeries builtin_series(const QuantParam& param, const SeriesRef& ref);

// Coefficients of e_q(X) = sum a_k X^k, from the product expansion, exact to u-order N.
std::vector<Series> e_q_coefficients(int64_t N);
// The same, from the recurrence a_k (1 - q^{2k}) = q^{2k-1} a_{k-1}, a_0 = 1.
std::vector<Series> e_q_coefficients_by_recurrence(int64_t N);

struct Factor {
  enum class Kind { Series, Monomial, Act };
  Kind kind = Kind::Series;
  SeriesRef ref;     // Series
  Vec h;             // Monomial: c e(h)
  UnitMonomial c;
  HeisRaw act;       // Act: applied to the product of the factors to its right

  static Factor series(std::string name, std::vector<Vec> dirs = {});
  static Factor monomial(Vec h, UnitMonomial c = {});
  static Factor action(HeisRaw a);
};

struct Term {
  Series coeff = Series(Cyclo(1));
  std::vector<Factor> word;
};

enum class EquationMode { OperatorEquation, ProductIdentity };
const char* to_string(EquationMode m);

// sum of coeff * word == 0, checked on |h|_inf <= window, to q-order `order`.
struct EquationSpec {
  std::string label;
  QuantParam param;
  std::vector<Term> terms;
  int window = 4;
  int64_t order = 16;  // q-units
  EquationMode mode = EquationMode::ProductIdentity;
};

struct CellMismatch {
  std::string equation;
  Vec h;
  int64_t uexp = 0;
  std::string value;
};

struct VerifyReport {
  std::string identity;
  int window = 0;
  int64_t order = 0;  // q-units
  int64_t cells_checked = 0;
  bool pass = true;
  std::optional<CellMismatch> first_mismatch;
  std::vector<std::string> equations;
};

// Build every term as a torus series (checks references and operand kinds).
std::vector<TorusSeries> resolve_terms(const EquationSpec& spec);
VerifyReport verify_equation(const EquationSpec& spec, int jobs = 1);

std::vector<std::string> named_identities();
// The equations of a registered identity at its canonical (R, N).
std::vector<EquationSpec> named_equations(const std::string& id);
VerifyReport verify_named(const std::string& id, std::optional<int> window = std::nullopt,
                          std::optional<int64_t> order = std::nullopt, int jobs = 1);
VerifyReport verify_all(const std::string& id, std::vector<EquationSpec> specs, std::optional<int> window,
                        std::optional<int64_t> order, int jobs);
// Multiply the first term's coefficient by q: a deliberately wrong registry entry.
void corrupt(std::vector<EquationSpec>& specs);

}  // namespace qtheta
