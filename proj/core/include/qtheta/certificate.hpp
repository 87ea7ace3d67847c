#pragma once

#include <functional>
#include <vector>

#include "qtheta/lattice.hpp"
#include "qtheta/quant_param.hpp"

namespace qtheta {

// z^T P z + l.z + c with rational entries, P symmetric.
struct Quadratic {
  RatMatrix P;
  std::vector<mpq_class> l;
  mpq_class c;

  int k() const { return static_cast<int>(l.size()); }
  static Quadratic zero(int k);
  static Quadratic constant(int k, const mpq_class& c);
  mpq_class eval(const Vec& z) const;
};

// The support piece {base + gens z : z in Z^k, z_i >= 0 where nonneg[i]} together with
// lower bounds: the coefficient at base + gens z has valuation >= bound(z) for every bound.
struct CertPiece {
  Vec base;
  IntMatrix gens;
  std::vector<bool> nonneg;
  std::vector<Quadratic> bounds;

  int k() const { return gens.cols(); }
  Vec point(const Vec& z) const;
};

// Valuation certificate of a torus series: every coefficient outside the union of the
// pieces vanishes, and inside a piece its valuation is bounded below as stated.
class Certificate {
 public:
  Certificate() = default;
  Certificate(int rank, std::vector<CertPiece> pieces);
  // Finite support with a valuation lower bound per point.
  static Certificate finite(int rank, const std::vector<std::pair<Vec, int64_t>>& points);

  int rank() const { return rank_; }
  const std::vector<CertPiece>& pieces() const { return pieces_; }

  // Coefficients get multiplied by monomials of valuation lambda.h + kappa.
  Certificate with_linear(const Vec& lambda, int64_t kappa) const;
  Certificate translated(const Vec& offset) const;
  // Transport along f: H -> H' (f injective on the support is the caller's concern).
  Certificate mapped(const IntMatrix& f) const;
  // Weaker certificate with every bound lowered by `slack` (more candidate points).
  Certificate relaxed(int64_t slack) const;
  // Joint certificate of the product a*b in T(H, alpha); piece (i,j) is at i*b.size()+j
  // and its parameters are (z_a, z_b).
  static Certificate product(const Certificate& a, const Certificate& b, const QuantParam& param);
  // External product on H1 + H2.
  static Certificate external(const Certificate& a, const Certificate& b);

  struct Point {
    int piece;
    Vec z;
  };
  // Parameter points over h whose bounds are all <= N.
  std::vector<Point> fiber(const Vec& h, int64_t N) const;
  // Finite superset of {h : valuation(a_h) <= N}, sorted, without duplicates.
  std::vector<Vec> enumerate(int64_t N) const;
  // ceil(max over bounds) at a point: a valuation lower bound for that parameter.
  int64_t lower_bound(const Point& p) const;

 private:
  int rank_ = 0;
  std::vector<CertPiece> pieces_;
};

}  // namespace qtheta
