#pragma once

#include <optional>
#include <string>

#include "qtheta/quant_param.hpp"
#include "qtheta/torus_series.hpp"

namespace qtheta {

// [c; x, g, h] acting by f -> c e(g) x^*(f) e(h)^{-1}.
struct HeisRaw {
  UnitMonomial c;
  TorusPoint x;
  Vec g, h;

  static HeisRaw identity(int d) { return {UnitMonomial(), TorusPoint::identity(d), Vec(d, 0), Vec(d, 0)}; }
  friend bool operator==(const HeisRaw& a, const HeisRaw& b) {
    return a.c == b.c && a.x == b.x && a.g == b.g && a.h == b.h;
  }
  std::string to_string() const;
};

// Group law of the big group: a * b means "apply b, then a".
HeisRaw heis_mul(const QuantParam& param, const HeisRaw& a, const HeisRaw& b);
// The kernel element [1; A_h^2, h, h].
HeisRaw kernel_element(const QuantParam& param, const Vec& h);
HeisRaw left_representative(const QuantParam& param, const HeisRaw& a);
HeisRaw right_representative(const QuantParam& param, const HeisRaw& a);
bool same_class(const QuantParam& param, const HeisRaw& a, const HeisRaw& b);
// Coefficient of e(k + g - h) in a(e(k)).
UnitMonomial action_factor(const QuantParam& param, const HeisRaw& a, const Vec& k);
TorusSeries heis_act(const QuantParam& param, const HeisRaw& a, const TorusSeries& f);

// A class modulo the kernel, stored as its left representative [c_l; x_l, h_l, 0].
class HeisElement {
 public:
  HeisElement() = default;
  HeisElement(QuantParam param, UnitMonomial c_l, TorusPoint x_l, Vec h_l);
  static HeisElement from_raw(const QuantParam& param, const HeisRaw& raw);
  static HeisElement identity(const QuantParam& param, const TorusPoint& xi);
  static HeisElement identity(const QuantParam& param) { return identity(param, TorusPoint::identity(param.rank())); }

  const QuantParam& param() const { return param_; }
  const UnitMonomial& c_l() const { return c_; }
  const TorusPoint& x_l() const { return x_; }
  const Vec& h_l() const { return h_; }
  UnitMonomial c_r() const;
  TorusPoint x_r() const;
  Vec h_r() const { return vec_neg(h_); }

  HeisRaw left() const { return {c_, x_, h_, Vec(h_.size(), 0)}; }
  HeisRaw right() const { return {c_r(), x_r(), Vec(h_.size(), 0), h_r()}; }

  HeisElement operator*(const HeisElement& o) const;
  HeisElement inverse() const;
  HeisElement pow(int64_t n) const;
  TorusSeries act(const TorusSeries& f) const { return heis_act(param_, left(), f); }

  friend bool operator==(const HeisElement& a, const HeisElement& b) {
    return a.param_ == b.param_ && a.c_ == b.c_ && a.x_ == b.x_ && a.h_ == b.h_;
  }
  friend bool operator!=(const HeisElement& a, const HeisElement& b) { return !(a == b); }
  std::string to_string() const;

 private:
  QuantParam param_;
  UnitMonomial c_;
  TorusPoint x_;
  Vec h_;
};

bool composable(const HeisElement& a, const HeisElement& b);
// a o b: first b, then a; needs x_r(a) == x_l(b).
HeisElement compose(const HeisElement& a, const HeisElement& b);
HeisElement groupoid_inverse(const HeisElement& a);
// [c; 1, g, h] in the class, when it exists (A nondegenerate).
std::optional<HeisRaw> double_sided(const HeisElement& a);
// u_{alpha,beta}: [c; x, h, 0]_alpha -> [c; x A_h^{-1} B_h, h, 0]_beta
HeisElement twist(const QuantParam& source, const QuantParam& target, const HeisElement& a);
// psi_{d,n} from G(H, alpha^d) to G(H, alpha).
HeisElement psi_dn(int64_t d, int64_t n, const HeisElement& a, const QuantParam& target);

// F with F^*(e_1(h)) = a_h e_2(f h), f: H1 -> H2 (columns are images of basis vectors).
class TorusMorphism {
 public:
  TorusMorphism(IntMatrix f, TorusPoint a, QuantParam source, QuantParam target);
  static TorusMorphism identity(const QuantParam& param);
  // [n]: from alpha^{n^2} to alpha
  static TorusMorphism multiplication(const QuantParam& alpha, int64_t n);
  // Mumford's M: (h, g) -> (h + g, h - g), from alpha^2 + alpha^2 to alpha + alpha
  static TorusMorphism mumford(const QuantParam& alpha);

  const IntMatrix& f() const { return f_; }
  const TorusPoint& a() const { return a_; }
  const QuantParam& source() const { return src_; }
  const QuantParam& target() const { return dst_; }
  // alpha_1(h,g) alpha_2(f h, f g)^{-1}, a sign
  int characteristic(const Vec& h, const Vec& g) const;
  bool injective() const;
  // phi: T(H2,1) -> T(H1,1), phi(x)(g) = f(g)(x)
  TorusPoint induced_point(const TorusPoint& x) const;
  std::optional<Vec> preimage(const Vec& h2) const;

 private:
  IntMatrix f_;
  TorusPoint a_;
  QuantParam src_, dst_;
};

TorusSeries morphism_pullback(const TorusMorphism& F, const TorusSeries& f);
// [c a_g; x, f(g), 0]_{alpha_2} -> [c; phi(x), g, 0]_{alpha_1}
HeisElement heis_transport(const TorusMorphism& F, const HeisElement& b);

}  // namespace qtheta
