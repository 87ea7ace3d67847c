#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "qtheta/certificate.hpp"
#include "qtheta/quant_param.hpp"
#include "qtheta/series.hpp"

namespace qtheta {

enum class SeriesKind { Algebraic, Proper, Formal };
const char* to_string(SeriesKind k);

class SeriesImpl;

// A formal function sum a_h e(h) on T(H, alpha).  Coefficients are produced on demand
// to a requested u-order and memoized; values are immutable and shareable.
class TorusSeries {
 public:
  TorusSeries() = default;
  explicit TorusSeries(std::shared_ptr<const SeriesImpl> impl) : impl_(std::move(impl)) {}

  static TorusSeries algebraic(const QuantParam& param, std::map<Vec, Series> terms, std::string label = "");
  static TorusSeries monomial(const QuantParam& param, const Vec& h, const UnitMonomial& c = {});
  static TorusSeries one(const QuantParam& param);
  // A coefficient rule.  Proper kind needs a certificate; formal kind must not have one.
  static TorusSeries rule(const QuantParam& param, SeriesKind kind, std::optional<Certificate> cert,
                          std::function<Series(const Vec&, int64_t)> coeff, std::string label);

  const QuantParam& param() const;
  SeriesKind kind() const;
  const std::string& label() const;
  bool has_certificate() const;
  const Certificate& certificate() const;
  // Explicit terms of an algebraic series.
  const std::map<Vec, Series>& terms() const;

  // Coefficient of e(h), exact up to u-order `order`.
  Series coeff(const Vec& h, int64_t order) const;
  // enumerator(N): finite superset of {h : valuation(a_h) <= N}.
  std::vector<Vec> enumerate(int64_t N) const;

  // Same coefficients, certificate replaced (the caller vouches for validity).
  TorusSeries with_certificate(Certificate cert, std::string label = "") const;

 private:
  std::shared_ptr<const SeriesImpl> impl_;
};

class SeriesImpl {
 public:
  SeriesImpl(QuantParam param, SeriesKind kind, std::optional<Certificate> cert, std::string label);
  virtual ~SeriesImpl() = default;

  Series coefficient(const Vec& h, int64_t order) const;
  const QuantParam& param() const { return param_; }
  SeriesKind kind() const { return kind_; }
  const std::optional<Certificate>& certificate() const { return cert_; }
  const std::string& label() const { return label_; }
  virtual const std::map<Vec, Series>* explicit_terms() const { return nullptr; }

 protected:
  virtual Series compute(const Vec& h, int64_t order) const = 0;

 private:
  QuantParam param_;
  SeriesKind kind_;
  std::optional<Certificate> cert_;
  std::string label_;
  mutable std::mutex mu_;
  mutable std::unordered_map<Vec, Series, VecHash> cache_;
};

// sum over g1 + g2 = h of a_{g1} b_{g2} alpha(g1, g2), summation range certified.
TorusSeries multiply(const TorusSeries& a, const TorusSeries& b);
TorusSeries add(const TorusSeries& a, const TorusSeries& b);
TorusSeries scale(const TorusSeries& f, const UnitMonomial& c);

// Coefficient at k' = k + offset becomes mu(k) a_k, where mu is a monomial whose
// valuation is exactly lambda.k + kappa.
TorusSeries monomial_transform(const TorusSeries& f, const Vec& offset, std::function<UnitMonomial(const Vec&)> mu,
                               const Vec& lambda, int64_t kappa, std::string label);
// x^*: coefficient at h becomes h(x) a_h.
TorusSeries shift_pullback(const TorusPoint& x, const TorusSeries& f);
// Transport along an injective lattice map: sum a(h) a_h e'(f h), a multiplicative.
TorusSeries lattice_pushforward(const TorusSeries& f, const IntMatrix& map, const TorusPoint& a,
                                const QuantParam& target);
// Same coefficients read on T(H, target): the renaming e_alpha(h) -> e_beta(h).
TorusSeries rename_param(const TorusSeries& f, const QuantParam& target);
// External product on H1 + H2 with the direct-sum parameter.
TorusSeries external_product(const TorusSeries& a, const TorusSeries& b);

// e(h) f e(h)^{-1} == (A_h^{-2})^* f, coefficient-exactly (algebraic f).
bool conjugation_check(const QuantParam& param, const Vec& h, const TorusSeries& f);

// Window evaluation: all h with |h|_inf <= R, lexicographic, coefficients to u-order N.
struct WindowTable {
  int R = 0;
  int64_t order = 0;
  std::vector<std::pair<Vec, Series>> cells;
};
std::vector<Vec> window_points(int rank, int R);
WindowTable evaluate(const TorusSeries& f, int R, int64_t order, int jobs = 1);
// Parallel map over window cells with deterministic output order.
void for_each_cell(const std::vector<Vec>& cells, int jobs, const std::function<void(size_t)>& body);

}  // namespace qtheta
