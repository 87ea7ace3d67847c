#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qtheta/cyclo.hpp"

namespace qtheta {

// Truncation orders are u-exponents; kExact marks a series known in every degree.
inline constexpr int64_t kExact = std::numeric_limits<int64_t>::max() / 4;

inline int64_t order_add(int64_t a, int64_t b) {
  if (a >= kExact || b >= kExact) return kExact;
  int64_t s = a + b;
  return s >= kExact ? kExact : s;
}

// coeff * u^uexp with coeff != 0.
class UnitMonomial {
 public:
  UnitMonomial() : coeff_(1), uexp_(0) {}
  UnitMonomial(Cyclo coeff, int64_t uexp);
  static UnitMonomial one() { return {}; }
  static UnitMonomial u_power(int64_t k) { return UnitMonomial(Cyclo(1), k); }
  static UnitMonomial sign(int s) { return UnitMonomial(Cyclo(s < 0 ? -1 : 1), 0); }

  const Cyclo& coeff() const { return coeff_; }
  int64_t uexp() const { return uexp_; }
  bool is_one() const { return uexp_ == 0 && coeff_.is_one(); }

  UnitMonomial& operator*=(const UnitMonomial& o);
  friend UnitMonomial operator*(UnitMonomial a, const UnitMonomial& b) { return a *= b; }
  UnitMonomial inverse() const;
  UnitMonomial pow(int64_t e) const;
  std::optional<UnitMonomial> sqrt() const;
  // n-th root inside the monomial group, when one exists.
  std::optional<UnitMonomial> root(int64_t n) const;

  friend bool operator==(const UnitMonomial& a, const UnitMonomial& b) {
    return a.uexp_ == b.uexp_ && a.coeff_ == b.coeff_;
  }
  friend bool operator!=(const UnitMonomial& a, const UnitMonomial& b) { return !(a == b); }
  std::string to_string() const;

 private:
  Cyclo coeff_;
  int64_t uexp_;
};

// Truncated Laurent series in u over Q(zeta_m): exact in degrees <= order().
class Series {
 public:
  Series() = default;  // exact zero
  explicit Series(const Cyclo& c, int64_t order = kExact);
  explicit Series(const UnitMonomial& m, int64_t order = kExact);
  static Series zero(int64_t order = kExact);
  static Series from_terms(const std::map<int64_t, Cyclo>& terms, int64_t order = kExact);

  int64_t order() const { return order_; }
  bool is_exact() const { return order_ >= kExact; }
  bool is_zero() const { return c_.empty(); }
  std::optional<int64_t> valuation() const;
  // Valuation, or order+1 when nothing nonzero is known.
  int64_t valuation_bound() const;
  int64_t max_exponent() const;
  Cyclo coeff(int64_t e) const;
  std::vector<std::pair<int64_t, Cyclo>> terms() const;

  Series truncated(int64_t n) const;
  Series shifted(int64_t k) const;
  Series scaled(const Cyclo& c) const;
  Series times(const UnitMonomial& m) const;

  Series operator-() const;
  Series& operator+=(const Series& o);
  Series& operator-=(const Series& o);
  friend Series operator+(Series a, const Series& b) { return a += b; }
  friend Series operator-(Series a, const Series& b) { return a -= b; }
  friend Series operator*(const Series& a, const Series& b);
  // Product computed only up to exponent `cap` (and the natural order).
  static Series mul_upto(const Series& a, const Series& b, int64_t cap);

  // Multiplicative inverse.  Exact non-monomial inputs need an explicit target order.
  Series inverse(std::optional<int64_t> target_order = std::nullopt) const;

  // Same coefficients in every degree <= n (both must be known there).
  bool agrees_upto(const Series& o, int64_t n) const;
  friend bool operator==(const Series& a, const Series& b);
  friend bool operator!=(const Series& a, const Series& b) { return !(a == b); }
  std::string to_string() const;

 private:
  void normalize();
  int64_t lo_ = 0;
  std::vector<Cyclo> c_;
  int64_t order_ = kExact;
};

}  // namespace qtheta
