#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qtheta/heisenberg.hpp"
#include "qtheta/lattice.hpp"
#include "qtheta/torus_series.hpp"

namespace qtheta {

using PairingMatrix = std::vector<std::vector<UnitMonomial>>;

// A homomorphism L: B = Z^r -> G(H, alpha), given on the basis of B.
class Multiplier {
 public:
  Multiplier(QuantParam param, std::vector<HeisElement> images, std::optional<PairingMatrix> sqrt = std::nullopt);

  const QuantParam& param() const { return param_; }
  int rank_B() const { return static_cast<int>(images_.size()); }
  const std::vector<HeisElement>& images() const { return images_; }
  bool has_sqrt() const { return sqrt_.has_value(); }
  const PairingMatrix& sqrt_pairing() const;

  // h^-: B -> H, columns are h_l of the generators
  const IntMatrix& h_minus() const { return hminus_; }
  Vec h_l(const Vec& b) const { return hminus_.apply(b); }
  TorusPoint x_l(const Vec& b) const;
  TorusPoint x_r(const Vec& b) const;
  UnitMonomial c_l(const Vec& b) const;
  HeisElement image(const Vec& b) const;

  // <b1, b2> = h^-_{b2}(x_{l,b1}) alpha(h^-_{b1}, h^-_{b2})
  UnitMonomial pairing(const Vec& b1, const Vec& b2) const;
  // (b1, b2), the chosen square root extended bimultiplicatively
  UnitMonomial sqrt_value(const Vec& b1, const Vec& b2) const;
  // u-exponents of <e_i, e_j>
  IntMatrix valuation_form() const;

  QuotientData quotient() const { return QuotientData(param_.rank(), hminus_); }
  bool injective() const { return matrix_rank(hminus_) == rank_B(); }

  std::string to_string() const;

 private:
  QuantParam param_;
  std::vector<HeisElement> images_;
  std::optional<PairingMatrix> sqrt_;
  IntMatrix hminus_;
  PairingMatrix gram_;  // <e_i, e_j>
};

UnitMonomial structure_pairing(const Multiplier& L, const Vec& b1, const Vec& b2);

struct AutomorphyFactors {
  std::vector<UnitMonomial> psi_l, psi_r;
  PairingMatrix sqrt;
  std::vector<TorusPoint> x_l, x_r;
  std::vector<Vec> h_l, h_r;
};
AutomorphyFactors automorphy_factors(const Multiplier& L);
// psi_l takes values +-1
bool is_symmetric(const Multiplier& L);
bool is_ample(const Multiplier& L);

struct ThetaBasis {
  Multiplier multiplier;
  int dim = 0;
  int64_t index = 0;
  std::vector<Vec> cosets;        // representative of each basis element
  std::vector<TorusSeries> basis;  // a_j = 1 at the representative
  std::vector<Vec> inconsistent;   // cosets where the recurrence is overdetermined and fails
};
// strict: throw InconsistentRecurrence instead of reporting a partial basis
ThetaBasis theta_dim_basis(const Multiplier& L, bool strict = true);

// Membership test for both forms of the functional equations on a window.
struct MembershipReport {
  bool ok = true;
  int64_t cells = 0;
  std::optional<Vec> bad_cell;
  int bad_generator = -1;
  std::string side;
};
MembershipReport check_theta(const Multiplier& L, const TorusSeries& theta, int R, int64_t order, int jobs = 1);

// L^n = psi_{n,n} o L, where L lives over target^n
Multiplier power(const Multiplier& L, int64_t n, const QuantParam& target);
Multiplier power(const Multiplier& L, int64_t n);
Multiplier boxtimes(const Multiplier& a, const Multiplier& b);
// Lift through F: [c a_h; x', f(h), 0] with phi(x') = x.
Multiplier pullback(const TorusMorphism& F, const Multiplier& L);
// Restriction to B' -> B given by the columns of m.
Multiplier restrict(const Multiplier& L, const IntMatrix& m);
bool composable(const Multiplier& outer, const Multiplier& inner);
// b -> outer(b) o inner(b)
Multiplier compose(const Multiplier& outer, const Multiplier& inner);
// theta_inner * theta_outer lies in Gamma(compose(outer, inner))
TorusSeries theta_product(const Multiplier& outer, const Multiplier& inner, const TorusSeries& th_outer,
                          const TorusSeries& th_inner);
// Pairing predicted for the composition from the two factors.
UnitMonomial composed_pairing(const Multiplier& outer, const Multiplier& inner, const Vec& b1, const Vec& b2);
// b -> [chi_b; 1, h_b, f(h_b)] with h_b the columns of hl; f acts on H
Multiplier hidden_from_morphism(const QuantParam& param, const IntMatrix& hl, const IntMatrix& f,
                                const std::vector<UnitMonomial>& chi);
// the alternate form {b1, b2} of double-sided data
UnitMonomial hidden_form(const QuantParam& param, const Vec& hl1, const Vec& hr1, const Vec& hl2, const Vec& hr2);
Multiplier twist(const Multiplier& L, const QuantParam& target);

using PeriodMap = std::vector<TorusPoint>;
PeriodMap left_periods(const Multiplier& L);
PeriodMap right_periods(const Multiplier& L);
// Multipliers in Hom(xi, eta): x_r = xi and x_l = eta; pic_mode keeps ample ones only.
std::vector<Multiplier> pic_hom(const PeriodMap& xi, const PeriodMap& eta, const std::vector<Multiplier>& candidates,
                                bool pic_mode = false);

}  // namespace qtheta
