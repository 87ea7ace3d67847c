#include "qtheta/quant_param.hpp"

#include <sstream>

#include "qtheta/error.hpp"

namespace qtheta {

UnitMonomial TorusPoint::eval(const Vec& h) const {
  if (static_cast<int>(h.size()) != rank())
    fail(ErrorCode::DimensionMismatch, "point of rank " + std::to_string(rank()) + " evaluated at " + vec_string(h));
  UnitMonomial r;
  for (int i = 0; i < rank(); ++i)
    if (h[i] != 0) r *= v_[i].pow(h[i]);
  return r;
}

Vec TorusPoint::valuation_vector() const {
  Vec v(rank());
  for (int i = 0; i < rank(); ++i) v[i] = v_[i].uexp();
  return v;
}

bool TorusPoint::is_identity() const {
  for (const auto& x : v_)
    if (!x.is_one()) return false;
  return true;
}

TorusPoint TorusPoint::operator*(const TorusPoint& o) const {
  if (rank() != o.rank()) fail(ErrorCode::DimensionMismatch, "points of different rank");
  std::vector<UnitMonomial> r(v_);
  for (int i = 0; i < rank(); ++i) r[i] *= o.v_[i];
  return TorusPoint(std::move(r));
}

TorusPoint TorusPoint::inverse() const {
  std::vector<UnitMonomial> r;
  for (const auto& x : v_) r.push_back(x.inverse());
  return TorusPoint(std::move(r));
}

TorusPoint TorusPoint::pow(int64_t e) const {
  std::vector<UnitMonomial> r;
  for (const auto& x : v_) r.push_back(x.pow(e));
  return TorusPoint(std::move(r));
}

std::string TorusPoint::to_string() const {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < rank(); ++i) os << (i ? ", " : "") << v_[i].to_string();
  os << ")";
  return os.str();
}

QuantParam::QuantParam() : QuantParam(IntMatrix(0, 0), IntMatrix(0, 0)) {}

QuantParam::QuantParam(IntMatrix A, IntMatrix S, const CycloField& field) {
  int d = A.rows();
  if (A.cols() != d || S.rows() != d || S.cols() != d)
    fail(ErrorCode::DimensionMismatch, "quantization matrices must be square of equal size");
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (A.at(i, j) != -A.at(j, i)) fail(ErrorCode::InvalidArgument, "exponent matrix A is not antisymmetric");
      if ((S.at(i, j) - S.at(j, i)) % 2 != 0) fail(ErrorCode::InvalidArgument, "sign matrix S is not symmetric mod 2");
    }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) S.at(i, j) = ((S.at(i, j) % 2) + 2) % 2;
  d_ = std::make_shared<Data>(Data{std::move(A), std::move(S), &field});
}

QuantParam QuantParam::trivial(int d, const CycloField& field) { return QuantParam(IntMatrix(d, d), IntMatrix(d, d), field); }

QuantParam QuantParam::quantum_torus(const CycloField& field) {
  return QuantParam(IntMatrix{{0, 2}, {-2, 0}}, IntMatrix(2, 2), field);
}

bool QuantParam::is_trivial() const { return A().is_zero() && S().is_zero(); }

int64_t QuantParam::alpha_uexp(const Vec& g, const Vec& h) const { return bilinear_eval(A(), g, h); }

int QuantParam::alpha_sign(const Vec& g, const Vec& h) const {
  if (S().is_zero()) {
    if (static_cast<int>(g.size()) != rank() || static_cast<int>(h.size()) != rank())
      fail(ErrorCode::DimensionMismatch, "pairing arguments of wrong length");
    return 1;
  }
  int64_t s = bilinear_eval(S(), g, h);
  return (s % 2 == 0) ? 1 : -1;
}

UnitMonomial QuantParam::alpha(const Vec& g, const Vec& h) const {
  return unit(alpha_sign(g, h), alpha_uexp(g, h));
}

int QuantParam::epsilon(const Vec& h) const { return alpha_sign(h, h); }

TorusPoint QuantParam::hidden_point(const Vec& h) const {
  int d = rank();
  std::vector<UnitMonomial> v;
  for (int i = 0; i < d; ++i) {
    Vec e(d, 0);
    e[i] = 1;
    v.push_back(alpha(e, h));
  }
  return TorusPoint(std::move(v));
}

QuantParam QuantParam::power(int64_t d) const {
  IntMatrix S = (d % 2 == 0) ? IntMatrix(rank(), rank()) : this->S();
  return QuantParam(A().scaled(d), S, field());
}

QuantParam QuantParam::direct_sum(const QuantParam& o) const {
  if (&field() != &o.field()) fail(ErrorCode::FieldMismatch, "direct sum of params over different fields");
  return QuantParam(IntMatrix::block_diag(A(), o.A()), IntMatrix::block_diag(S(), o.S()), field());
}

UnitMonomial QuantParam::unit(long sign, int64_t uexp) const {
  return UnitMonomial(Cyclo(field(), {mpq_class(sign < 0 ? -1 : 1)}), uexp);
}

bool operator==(const QuantParam& a, const QuantParam& b) {
  if (a.d_ == b.d_) return true;
  return a.A() == b.A() && a.S() == b.S() && &a.field() == &b.field();
}

std::string QuantParam::to_string() const { return "{A=" + A().to_string() + ", S=" + S().to_string() + "}"; }

void require_same_param(const QuantParam& a, const QuantParam& b, const char* where) {
  if (a != b) fail(ErrorCode::ParamMismatch, std::string(where) + ": " + a.to_string() + " vs " + b.to_string());
}

}  // namespace qtheta
