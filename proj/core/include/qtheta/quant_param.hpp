#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qtheta/lattice.hpp"
#include "qtheta/series.hpp"

namespace qtheta {

// A point of the commutative torus T(H,1)(K): values on the basis characters of H.
class TorusPoint {
 public:
  TorusPoint() = default;
  explicit TorusPoint(std::vector<UnitMonomial> values) : v_(std::move(values)) {}
  static TorusPoint identity(int d) { return TorusPoint(std::vector<UnitMonomial>(d)); }

  int rank() const { return static_cast<int>(v_.size()); }
  const std::vector<UnitMonomial>& values() const { return v_; }
  const UnitMonomial& operator[](int i) const { return v_[i]; }

  // h(x) = prod x_i^{h_i}
  UnitMonomial eval(const Vec& h) const;
  // Linear part of the valuation of h(x), i.e. the vector of u-exponents.
  Vec valuation_vector() const;
  bool is_identity() const;

  TorusPoint operator*(const TorusPoint& o) const;
  TorusPoint inverse() const;
  TorusPoint pow(int64_t e) const;
  friend bool operator==(const TorusPoint& a, const TorusPoint& b) { return a.v_ == b.v_; }
  friend bool operator!=(const TorusPoint& a, const TorusPoint& b) { return !(a == b); }
  std::string to_string() const;

 private:
  std::vector<UnitMonomial> v_;
};

// alpha(g,h) = (-1)^{g^T S h} u^{g^T A h} on H = Z^d; A antisymmetric, S symmetric mod 2.
class QuantParam {
 public:
  QuantParam();
  QuantParam(IntMatrix A, IntMatrix S, const CycloField& field = CycloField::get(1));
  static QuantParam trivial(int d, const CycloField& field = CycloField::get(1));
  // T_q: alpha(h1,h2) = q.
  static QuantParam quantum_torus(const CycloField& field = CycloField::get(1));

  int rank() const { return d_->A.rows(); }
  const IntMatrix& A() const { return d_->A; }
  const IntMatrix& S() const { return d_->S; }
  const CycloField& field() const { return *d_->field; }
  bool is_trivial() const;

  UnitMonomial alpha(const Vec& g, const Vec& h) const;
  int64_t alpha_uexp(const Vec& g, const Vec& h) const;
  int alpha_sign(const Vec& g, const Vec& h) const;
  int epsilon(const Vec& h) const;
  // A_h: the point with g(A_h) = alpha(g,h).
  TorusPoint hidden_point(const Vec& h) const;

  // alpha^d: A scaled by d, S kept for odd d and cleared for even d.
  QuantParam power(int64_t d) const;
  QuantParam direct_sum(const QuantParam& o) const;
  // A constant in this param's field.
  UnitMonomial unit(long sign, int64_t uexp) const;

  friend bool operator==(const QuantParam& a, const QuantParam& b);
  friend bool operator!=(const QuantParam& a, const QuantParam& b) { return !(a == b); }
  std::string to_string() const;

 private:
  struct Data {
    IntMatrix A, S;
    const CycloField* field;
  };
  std::shared_ptr<const Data> d_;
};

void require_same_param(const QuantParam& a, const QuantParam& b, const char* where);

}  // namespace qtheta
