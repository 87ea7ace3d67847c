#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qtheta/multiplier.hpp"

namespace qtheta {

// [c; xi, gamma, 0], taken modulo L(B).
struct SmallHeisElement {
  UnitMonomial c;
  TorusPoint xi;
  Vec gamma;

  HeisElement element(const QuantParam& p) const { return HeisElement(p, c, xi, gamma); }
  std::string to_string() const;
};

// Which right-hand side to use when solving for xi given gamma.
enum class LiftEquation {
  Periods,  // h^-_b(xi) = gamma(x_{l,b}) alpha^2(h^-_b, gamma), the normalizer condition itself
  Literal,  // h^-_b(xi) = alpha^2(h^-_b, gamma): the printed gamma(b) read as carrying no period factor
};

struct SmallHeisStructure {
  Multiplier multiplier;
  QuotientData quotient;
  // kernel of T(H,1) -> T(h^-(B),1): generators and their orders
  std::vector<TorusPoint> kernel_gens;
  std::vector<int64_t> kernel_orders;
  std::vector<TorusPoint> kernel_elements;  // all of them, identity first
  std::vector<Vec> cosets;                  // canonical representatives of H / h^-(B)
  // duality[i][j] = log of gamma_j(kappa_i) as a power of the primitive M-th root, M = lcm(2, m)
  std::vector<std::vector<long>> duality;
  long root_order = 0;
  bool nondegenerate = false;
};

// Normalizer condition on all generators; needs L(B) -> T(H,1)(K) x H injective.
bool normalizer_membership(const Multiplier& L, const SmallHeisElement& g);
// The same question answered by conjugating every generator image.
bool normalizes_by_conjugation(const Multiplier& L, const SmallHeisElement& g);
std::vector<SmallHeisElement> gamma_lift(const Multiplier& L, const Vec& gamma,
                                         LiftEquation eq = LiftEquation::Periods);
SmallHeisStructure group_structure(const Multiplier& L);

// lift(g1) lift(g2) = [c; kappa, 0, 0] lift(g3) L(b) with g3 the reduced sum; returns (c, kappa).
struct CocycleEntry {
  Vec g1, g2, g3;
  UnitMonomial c;
  TorusPoint kappa;
};
std::vector<CocycleEntry> lifting_cocycle(const Multiplier& L);

using SeriesMatrix = std::vector<std::vector<Series>>;
// Matrix of g on the basis: g(theta_j) = sum_i m[i][j] theta_i, verified on the window.
SeriesMatrix act_on_theta(const SmallHeisElement& g, const ThetaBasis& basis, int R, int64_t order, int jobs = 1);

struct CharacterSplit {
  std::vector<Vec> labels;                    // coset of each basis theta
  std::vector<std::vector<long>> characters;  // kernel generator i acts on theta_j by omega^{characters[j][i]}
};
CharacterSplit character_split(const Multiplier& L, const ThetaBasis& basis, int R, int64_t order);

// Dimension of {X : X M = M X for all M}, over exact Laurent entries (monomial entries expected).
int commutant_dimension(const std::vector<SeriesMatrix>& mats);

struct MumfordResult {
  TorusSeries series;
  Multiplier multiplier;
  MembershipReport report;
};
// M^*(th1 x th2) checked against pullback(M, L x L).  With twist_target (a parameter on H + H)
// the run is made over twist_target and the f-pulled-back source parameter; coefficients are unchanged.
MumfordResult mumford_theta_pullback(const Multiplier& L, const TorusSeries& th1, const TorusSeries& th2, int R,
                                     int64_t order, const std::optional<QuantParam>& twist_target = std::nullopt,
                                     int jobs = 1);

}  // namespace qtheta
