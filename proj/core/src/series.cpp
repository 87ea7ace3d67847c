#include "qtheta/series.hpp"

#include <numeric>
#include <sstream>

#include "qtheta/error.hpp"

namespace qtheta {

UnitMonomial::UnitMonomial(Cyclo coeff, int64_t uexp) : coeff_(std::move(coeff)), uexp_(uexp) {
  if (coeff_.is_zero()) fail(ErrorCode::InvalidArgument, "unit monomial with zero coefficient");
}

UnitMonomial& UnitMonomial::operator*=(const UnitMonomial& o) {
  coeff_ *= o.coeff_;
  uexp_ += o.uexp_;
  return *this;
}

UnitMonomial UnitMonomial::inverse() const { return UnitMonomial(coeff_.inverse(), -uexp_); }

UnitMonomial UnitMonomial::pow(int64_t e) const { return UnitMonomial(coeff_.pow(e), uexp_ * e); }

std::optional<UnitMonomial> UnitMonomial::sqrt() const { return root(2); }

namespace {

std::optional<mpz_class> int_root(const mpz_class& v, int64_t n) {
  if (v < 0) {
    if (n % 2 == 0) return std::nullopt;
    auto r = int_root(-v, n);
    if (!r) return std::nullopt;
    return mpz_class(-*r);
  }
  mpz_class r;
  if (mpz_root(r.get_mpz_t(), v.get_mpz_t(), static_cast<unsigned long>(n)) == 0) return std::nullopt;
  return r;
}

}  // namespace

std::optional<UnitMonomial> UnitMonomial::root(int64_t n) const {
  if (n <= 0) fail(ErrorCode::InvalidArgument, "root of non-positive degree");
  if (n == 1) return *this;
  if (uexp_ % n != 0) return std::nullopt;
  const CycloField& f = coeff_.field();
  if (coeff_.is_rational()) {
    const mpq_class& v = coeff_.constant_term();
    if (v > 0 || n % 2 == 1) {
      auto rn = int_root(v.get_num(), n), rd = int_root(v.get_den(), n);
      if (rn && rd) return UnitMonomial(Cyclo(f, {mpq_class(*rn, *rd)}), uexp_ / n);
    }
  }
  if (n == 2) {
    auto s = coeff_.sqrt();
    if (s) return UnitMonomial(*s, uexp_ / 2);
    return std::nullopt;
  }
  auto k = coeff_.root_log();
  if (!k) return std::nullopt;
  long M = f.root_order();
  for (long j = 0; j < M; ++j)
    if ((j * n - *k) % M == 0) return UnitMonomial(Cyclo::root_of_unity(f, j), uexp_ / n);
  return std::nullopt;
}

std::string UnitMonomial::to_string() const {
  std::string c = coeff_.is_rational() ? coeff_.to_string() : "(" + coeff_.to_string() + ")";
  if (uexp_ == 0) return c;
  return c + "*u^" + std::to_string(uexp_);
}

Series::Series(const Cyclo& c, int64_t order) : lo_(0), order_(order) {
  if (!c.is_zero() && order >= 0) c_.push_back(c);
}

Series::Series(const UnitMonomial& m, int64_t order) : lo_(m.uexp()), order_(order) {
  if (m.uexp() <= order) c_.push_back(m.coeff());
}

Series Series::zero(int64_t order) {
  Series s;
  s.order_ = order;
  return s;
}

Series Series::from_terms(const std::map<int64_t, Cyclo>& terms, int64_t order) {
  Series s;
  s.order_ = order;
  if (terms.empty()) return s;
  s.lo_ = terms.begin()->first;
  int64_t hi = std::min(terms.rbegin()->first, order);
  if (hi < s.lo_) return s;
  s.c_.assign(static_cast<size_t>(hi - s.lo_ + 1), Cyclo());
  for (const auto& [e, c] : terms)
    if (e <= hi) s.c_[static_cast<size_t>(e - s.lo_)] = c;
  s.normalize();
  return s;
}

void Series::normalize() {
  if (!c_.empty() && lo_ + static_cast<int64_t>(c_.size()) - 1 > order_) {
    int64_t keep = order_ - lo_ + 1;
    c_.resize(keep > 0 ? static_cast<size_t>(keep) : 0);
  }
  while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
  size_t first = 0;
  while (first < c_.size() && c_[first].is_zero()) ++first;
  if (first == c_.size()) {
    c_.clear();
    lo_ = 0;
    return;
  }
  if (first > 0) {
    c_.erase(c_.begin(), c_.begin() + static_cast<long>(first));
    lo_ += static_cast<int64_t>(first);
  }
}

std::optional<int64_t> Series::valuation() const {
  if (c_.empty()) return std::nullopt;
  return lo_;
}

int64_t Series::valuation_bound() const {
  if (c_.empty()) return order_add(order_, 1);
  return lo_;
}

int64_t Series::max_exponent() const { return c_.empty() ? lo_ : lo_ + static_cast<int64_t>(c_.size()) - 1; }

Cyclo Series::coeff(int64_t e) const {
  if (e > order_) fail(ErrorCode::InvalidArgument, "coefficient beyond truncation order requested");
  if (c_.empty() || e < lo_ || e > max_exponent()) return Cyclo();
  return c_[static_cast<size_t>(e - lo_)];
}

std::vector<std::pair<int64_t, Cyclo>> Series::terms() const {
  std::vector<std::pair<int64_t, Cyclo>> out;
  for (size_t i = 0; i < c_.size(); ++i)
    if (!c_[i].is_zero()) out.emplace_back(lo_ + static_cast<int64_t>(i), c_[i]);
  return out;
}

Series Series::truncated(int64_t n) const {
  if (n >= order_) return *this;
  Series s = *this;
  s.order_ = n;
  s.normalize();
  return s;
}

Series Series::shifted(int64_t k) const {
  Series s = *this;
  s.lo_ += k;
  s.order_ = order_add(order_, k);
  if (s.c_.empty()) s.lo_ = 0;
  return s;
}

Series Series::scaled(const Cyclo& c) const {
  if (c.is_zero()) return zero(order_);
  Series s = *this;
  for (auto& x : s.c_) x *= c;
  return s;
}

Series Series::times(const UnitMonomial& m) const { return scaled(m.coeff()).shifted(m.uexp()); }

Series Series::operator-() const {
  Series s = *this;
  for (auto& x : s.c_) x = -x;
  return s;
}

Series& Series::operator+=(const Series& o) {
  int64_t ord = std::min(order_, o.order_);
  if (o.c_.empty()) {
    order_ = ord;
    normalize();
    return *this;
  }
  if (c_.empty()) {
    *this = o;
    order_ = ord;
    normalize();
    return *this;
  }
  int64_t lo = std::min(lo_, o.lo_);
  int64_t hi = std::min(std::max(max_exponent(), o.max_exponent()), ord);
  if (hi < lo) {
    c_.clear();
    lo_ = 0;
    order_ = ord;
    return *this;
  }
  std::vector<Cyclo> r(static_cast<size_t>(hi - lo + 1), Cyclo());
  for (size_t i = 0; i < c_.size(); ++i) {
    int64_t e = lo_ + static_cast<int64_t>(i);
    if (e <= hi) r[static_cast<size_t>(e - lo)] = c_[i];
  }
  for (size_t i = 0; i < o.c_.size(); ++i) {
    int64_t e = o.lo_ + static_cast<int64_t>(i);
    if (e <= hi) r[static_cast<size_t>(e - lo)] += o.c_[i];
  }
  c_ = std::move(r);
  lo_ = lo;
  order_ = ord;
  normalize();
  return *this;
}

Series& Series::operator-=(const Series& o) { return *this += -o; }

Series Series::mul_upto(const Series& a, const Series& b, int64_t cap) {
  int64_t ord = std::min(order_add(a.order_, b.valuation_bound()), order_add(b.order_, a.valuation_bound()));
  ord = std::min(ord, cap);
  Series r = zero(ord);
  if (a.c_.empty() || b.c_.empty()) return r;
  int64_t lo = a.lo_ + b.lo_;
  int64_t hi = std::min(a.max_exponent() + b.max_exponent(), ord);
  if (hi < lo) return r;
  std::vector<Cyclo> out(static_cast<size_t>(hi - lo + 1), Cyclo());
  for (size_t i = 0; i < a.c_.size(); ++i) {
    if (a.c_[i].is_zero()) continue;
    int64_t ei = a.lo_ + static_cast<int64_t>(i);
    for (size_t j = 0; j < b.c_.size(); ++j) {
      int64_t e = ei + b.lo_ + static_cast<int64_t>(j);
      if (e > hi) break;
      if (b.c_[j].is_zero()) continue;
      out[static_cast<size_t>(e - lo)] += a.c_[i] * b.c_[j];
    }
  }
  r.lo_ = lo;
  r.c_ = std::move(out);
  r.normalize();
  return r;
}

Series operator*(const Series& a, const Series& b) { return Series::mul_upto(a, b, kExact); }

Series Series::inverse(std::optional<int64_t> target_order) const {
  if (c_.empty()) fail(ErrorCode::NotInvertible, "series vanishes within its truncation window");
  int64_t v = lo_;
  Cyclo inv0 = c_[0].inverse();
  int64_t ord;
  if (is_exact()) {
    if (c_.size() == 1) {
      Series r;
      r.lo_ = -v;
      r.c_.push_back(inv0);
      r.order_ = target_order ? *target_order : kExact;
      r.normalize();
      return r;
    }
    if (!target_order) fail(ErrorCode::InvalidArgument, "inverse of an exact non-monomial series needs an order");
    ord = *target_order;
  } else {
    // a = u^v (c0 + ...) known to relative precision order-v, so 1/a is known to order - 2v.
    ord = order_ - 2 * v;
    if (target_order) ord = std::min(ord, *target_order);
  }
  int64_t len = ord - (-v) + 1;
  Series r = zero(ord);
  if (len <= 0) return r;
  std::vector<Cyclo> s(static_cast<size_t>(len), Cyclo());
  s[0] = inv0;
  for (int64_t k = 1; k < len; ++k) {
    Cyclo acc;
    int64_t jmax = std::min<int64_t>(k, static_cast<int64_t>(c_.size()) - 1);
    for (int64_t j = 1; j <= jmax; ++j) {
      if (c_[static_cast<size_t>(j)].is_zero()) continue;
      acc += c_[static_cast<size_t>(j)] * s[static_cast<size_t>(k - j)];
    }
    s[static_cast<size_t>(k)] = -(acc * inv0);
  }
  r.lo_ = -v;
  r.c_ = std::move(s);
  r.normalize();
  return r;
}

bool Series::agrees_upto(const Series& o, int64_t n) const {
  if (n > order_ || n > o.order_) fail(ErrorCode::InvalidArgument, "comparison beyond known order");
  return (truncated(n) - o.truncated(n)).is_zero();
}

bool operator==(const Series& a, const Series& b) {
  if (a.order_ != b.order_ || a.c_.size() != b.c_.size()) return false;
  if (a.c_.empty()) return true;
  return a.lo_ == b.lo_ && a.c_ == b.c_;
}

std::string Series::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : terms()) {
    if (!first) os << " + ";
    first = false;
    std::string cs = c.is_rational() ? c.to_string() : "(" + c.to_string() + ")";
    if (e == 0)
      os << cs;
    else
      os << cs << "*u^" << e;
  }
  if (first) os << "0";
  if (!is_exact()) os << " + O(u^" << order_ + 1 << ")";
  return os.str();
}

}  // namespace qtheta
