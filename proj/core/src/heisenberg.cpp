#include "qtheta/heisenberg.hpp"

#include <sstream>

#include "qtheta/error.hpp"

namespace qtheta {

std::string HeisRaw::to_string() const {
  return "[" + c.to_string() + "; " + x.to_string() + ", " + vec_string(g) + ", " + vec_string(h) + "]";
}

namespace {

void check_raw(const QuantParam& p, const HeisRaw& a) {
  int d = p.rank();
  if (a.x.rank() != d || static_cast<int>(a.g.size()) != d || static_cast<int>(a.h.size()) != d)
    fail(ErrorCode::DimensionMismatch, "Heisenberg element " + a.to_string() + " on a lattice of rank " +
                                           std::to_string(d));
}

}  // namespace

HeisRaw heis_mul(const QuantParam& p, const HeisRaw& a, const HeisRaw& b) {
  check_raw(p, a);
  check_raw(p, b);
  UnitMonomial c = a.c * b.c * a.x.eval(b.g) * a.x.eval(b.h).inverse() * p.alpha(a.g, b.g) *
                   p.alpha(a.h, b.h).inverse();
  return {c, b.x * a.x, vec_add(b.g, a.g), vec_add(b.h, a.h)};
}

HeisRaw kernel_element(const QuantParam& p, const Vec& h) {
  return {UnitMonomial(), p.hidden_point(h).pow(2), h, h};
}

HeisRaw left_representative(const QuantParam& p, const HeisRaw& a) {
  check_raw(p, a);
  UnitMonomial c = a.c * p.alpha(a.h, a.g) * UnitMonomial::sign(p.epsilon(a.h));
  return {c, a.x * p.hidden_point(a.h).pow(-2), vec_sub(a.g, a.h), Vec(a.h.size(), 0)};
}

HeisRaw right_representative(const QuantParam& p, const HeisRaw& a) {
  check_raw(p, a);
  UnitMonomial c = a.c * p.alpha(a.h, a.g) * UnitMonomial::sign(p.epsilon(a.g));
  return {c, a.x * p.hidden_point(a.g).pow(-2), Vec(a.g.size(), 0), vec_sub(a.h, a.g)};
}

bool same_class(const QuantParam& p, const HeisRaw& a, const HeisRaw& b) {
  return left_representative(p, a) == left_representative(p, b);
}

UnitMonomial action_factor(const QuantParam& p, const HeisRaw& a, const Vec& k) {
  return a.c * a.x.eval(k) * p.alpha(a.g, k) * p.alpha(vec_add(a.g, k), a.h).inverse() *
         UnitMonomial::sign(p.epsilon(a.h));
}

TorusSeries heis_act(const QuantParam& p, const HeisRaw& a, const TorusSeries& f) {
  check_raw(p, a);
  require_same_param(p, f.param(), "heis_act");
  // valuation of the factor is linear in k: val(x) + A^T g - A h, constant val(c) - g^T A h
  Vec lambda = vec_sub(vec_add(a.x.valuation_vector(), p.A().transpose().apply(a.g)), p.A().apply(a.h));
  int64_t kappa = a.c.uexp() - p.alpha_uexp(a.g, a.h);
  return monomial_transform(
      f, vec_sub(a.g, a.h), [p, a](const Vec& k) { return action_factor(p, a, k); }, lambda, kappa,
      a.to_string() + "(" + f.label() + ")");
}

HeisElement::HeisElement(QuantParam param, UnitMonomial c_l, TorusPoint x_l, Vec h_l)
    : param_(std::move(param)), c_(std::move(c_l)), x_(std::move(x_l)), h_(std::move(h_l)) {
  if (x_.rank() != param_.rank() || static_cast<int>(h_.size()) != param_.rank())
    fail(ErrorCode::DimensionMismatch, "Heisenberg element of the wrong rank");
}

HeisElement HeisElement::from_raw(const QuantParam& p, const HeisRaw& raw) {
  HeisRaw l = left_representative(p, raw);
  return HeisElement(p, l.c, l.x, l.g);
}

HeisElement HeisElement::identity(const QuantParam& p, const TorusPoint& xi) {
  return HeisElement(p, UnitMonomial(), xi, Vec(p.rank(), 0));
}

UnitMonomial HeisElement::c_r() const { return c_ * UnitMonomial::sign(param_.epsilon(h_)); }

TorusPoint HeisElement::x_r() const { return x_ * param_.hidden_point(h_).pow(-2); }

HeisElement HeisElement::operator*(const HeisElement& o) const {
  require_same_param(param_, o.param_, "heis_mul");
  return from_raw(param_, heis_mul(param_, left(), o.left()));
}

HeisElement HeisElement::inverse() const {
  UnitMonomial c = c_.inverse() * x_.eval(h_) * UnitMonomial::sign(param_.epsilon(h_));
  return HeisElement(param_, c, x_.inverse(), vec_neg(h_));
}

HeisElement HeisElement::pow(int64_t n) const {
  HeisElement base = n < 0 ? inverse() : *this;
  uint64_t e = n < 0 ? -static_cast<uint64_t>(n) : static_cast<uint64_t>(n);
  HeisElement acc = identity(param_);
  while (e) {
    if (e & 1) acc = acc * base;
    base = base * base;
    e >>= 1;
  }
  return acc;
}

std::string HeisElement::to_string() const {
  return "[" + c_.to_string() + "; " + x_.to_string() + ", " + vec_string(h_) + ", 0]";
}

bool composable(const HeisElement& a, const HeisElement& b) {
  return a.param() == b.param() && a.x_r() == b.x_l();
}

HeisElement compose(const HeisElement& a, const HeisElement& b) {
  require_same_param(a.param(), b.param(), "compose");
  if (a.x_r() != b.x_l())
    fail(ErrorCode::NotComposable,
         "right point " + a.x_r().to_string() + " of the outer element differs from left point " +
             b.x_l().to_string() + " of the inner one");
  const QuantParam& p = a.param();
  int d = p.rank();
  HeisRaw outer{a.c_r(), TorusPoint::identity(d), Vec(d, 0), a.h_r()};
  return HeisElement::from_raw(p, heis_mul(p, outer, b.left()));
}

HeisElement groupoid_inverse(const HeisElement& a) {
  const QuantParam& p = a.param();
  return HeisElement(p, a.c_l().inverse() * UnitMonomial::sign(p.epsilon(a.h_l())), a.x_r(), vec_neg(a.h_l()));
}

std::optional<HeisRaw> double_sided(const HeisElement& a) {
  const QuantParam& p = a.param();
  if (determinant(p.A()) == 0) fail(ErrorCode::DegenerateAlpha, "alpha^2 is degenerate");
  // need x_l A_k^2 = 1, i.e. 2 A k = -val(x_l) with unit coefficients
  Vec rhs(p.rank());
  for (int i = 0; i < p.rank(); ++i) {
    const UnitMonomial& v = a.x_l()[i];
    if (!v.coeff().is_one() || v.uexp() % 2 != 0) return std::nullopt;
    rhs[i] = -v.uexp() / 2;
  }
  auto k = solve_integer(p.A(), rhs);
  if (!k) return std::nullopt;
  return HeisRaw{a.c_l() * p.alpha(a.h_l(), *k), TorusPoint::identity(p.rank()), vec_add(a.h_l(), *k), *k};
}

HeisElement twist(const QuantParam& source, const QuantParam& target, const HeisElement& a) {
  require_same_param(source, a.param(), "twist");
  if (source.rank() != target.rank())
    fail(ErrorCode::LatticeMismatch, "twist between lattices of rank " + std::to_string(source.rank()) + " and " +
                                         std::to_string(target.rank()));
  TorusPoint x = a.x_l() * source.hidden_point(a.h_l()).inverse() * target.hidden_point(a.h_l());
  return HeisElement(target, a.c_l(), x, a.h_l());
}

HeisElement psi_dn(int64_t d, int64_t n, const HeisElement& a, const QuantParam& target) {
  if (d == 0 || n % d != 0)
    fail(ErrorCode::Indivisible, std::to_string(d) + " does not divide " + std::to_string(n));
  require_same_param(target.power(d), a.param(), "psi_dn");
  return HeisElement(target, a.c_l().pow(n * n / d), a.x_l().pow(n / d), vec_scale(a.h_l(), n));
}

TorusMorphism::TorusMorphism(IntMatrix f, TorusPoint a, QuantParam source, QuantParam target)
    : f_(std::move(f)), a_(std::move(a)), src_(std::move(source)), dst_(std::move(target)) {
  if (f_.cols() != src_.rank() || f_.rows() != dst_.rank() || a_.rank() != src_.rank())
    fail(ErrorCode::DimensionMismatch, "torus morphism shape");
  for (int i = 0; i < src_.rank(); ++i)
    for (int j = 0; j < src_.rank(); ++j) {
      Vec ei(src_.rank(), 0), ej(src_.rank(), 0);
      ei[i] = 1;
      ej[j] = 1;
      if (dst_.alpha_uexp(f_.col(i), f_.col(j)) != src_.alpha_uexp(ei, ej))
        fail(ErrorCode::IncompatibleQuantization,
             "squares of the quantization forms differ on basis pair (" + std::to_string(i) + ", " +
                 std::to_string(j) + ")");
    }
}

TorusMorphism TorusMorphism::identity(const QuantParam& p) {
  return TorusMorphism(IntMatrix::identity(p.rank()), TorusPoint::identity(p.rank()), p, p);
}

TorusMorphism TorusMorphism::multiplication(const QuantParam& alpha, int64_t n) {
  int d = alpha.rank();
  return TorusMorphism(IntMatrix::identity(d).scaled(n), TorusPoint::identity(d), alpha.power(n * n), alpha);
}

TorusMorphism TorusMorphism::mumford(const QuantParam& alpha) {
  int d = alpha.rank();
  IntMatrix f(2 * d, 2 * d);
  for (int i = 0; i < d; ++i) {
    f.at(i, i) = 1;
    f.at(i, d + i) = 1;
    f.at(d + i, i) = 1;
    f.at(d + i, d + i) = -1;
  }
  QuantParam sq = alpha.power(2);
  return TorusMorphism(f, TorusPoint::identity(2 * d), sq.direct_sum(sq), alpha.direct_sum(alpha));
}

int TorusMorphism::characteristic(const Vec& h, const Vec& g) const {
  UnitMonomial v = src_.alpha(h, g) * dst_.alpha(f_.apply(h), f_.apply(g)).inverse();
  return v.coeff() == Cyclo(1) ? 1 : -1;
}

bool TorusMorphism::injective() const { return matrix_rank(f_) == f_.cols(); }

TorusPoint TorusMorphism::induced_point(const TorusPoint& x) const {
  std::vector<UnitMonomial> v;
  for (int j = 0; j < f_.cols(); ++j) v.push_back(x.eval(f_.col(j)));
  return TorusPoint(v);
}

std::optional<Vec> TorusMorphism::preimage(const Vec& h2) const { return solve_integer(f_, h2); }

TorusSeries morphism_pullback(const TorusMorphism& F, const TorusSeries& f) {
  require_same_param(F.source(), f.param(), "morphism_pullback");
  return lattice_pushforward(f, F.f(), F.a(), F.target());
}

HeisElement heis_transport(const TorusMorphism& F, const HeisElement& b) {
  require_same_param(F.target(), b.param(), "heis_transport");
  if (!F.injective()) fail(ErrorCode::InvalidArgument, "transport needs an injective lattice map");
  auto g = F.preimage(b.h_l());
  if (!g) fail(ErrorCode::NotInImage, "h_l = " + vec_string(b.h_l()) + " is not in the image of f");
  return HeisElement(F.source(), b.c_l() * F.a().eval(*g).inverse(), F.induced_point(b.x_l()), *g);
}

}  // namespace qtheta
