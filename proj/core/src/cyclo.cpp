#include "qtheta/cyclo.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include "qtheta/error.hpp"

namespace qtheta {

namespace {

using Poly = std::vector<mpq_class>;

void trim(Poly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, mpq_class(0));
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  }
  return r;
}

// Exact division in Q[z]; returns quotient, leaves remainder in `num`.
Poly poly_divmod(Poly& num, const Poly& den) {
  trim(num);
  if (num.size() < den.size()) return {};
  Poly q(num.size() - den.size() + 1, mpq_class(0));
  const mpq_class& lead = den.back();
  for (size_t i = num.size(); i-- >= den.size();) {
    if (num[i] == 0) continue;
    mpq_class t = num[i] / lead;
    size_t shift = i - (den.size() - 1);
    q[shift] = t;
    for (size_t j = 0; j < den.size(); ++j) num[shift + j] -= t * den[j];
  }
  trim(num);
  return q;
}

Poly cyclotomic(int m) {
  // x^m - 1 divided by Phi_d for every proper divisor d.
  Poly p(m + 1, mpq_class(0));
  p[0] = -1;
  p[m] = 1;
  for (int d = 1; d < m; ++d) {
    if (m % d != 0) continue;
    Poly num = p;
    p = poly_divmod(num, CycloField::get(d).modulus());
  }
  return p;
}

std::mutex& registry_mutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace

CycloField::CycloField(int m) : m_(m) {}

const CycloField& CycloField::get(int m) {
  if (m < 1) fail(ErrorCode::InvalidArgument, "cyclotomic order must be positive");
  static std::map<int, std::unique_ptr<CycloField>> fields;
  {
    std::lock_guard<std::mutex> lock(registry_mutex());
    auto it = fields.find(m);
    if (it != fields.end()) return *it->second;
  }
  // Build outside the lock: cyclotomic() recurses into get() for divisors.
  Poly phi = cyclotomic(m);
  std::unique_ptr<CycloField> f(new CycloField(m));
  f->phi_ = std::move(phi);
  int M = f->root_order();
  int deg = f->degree();
  // omega = z (m even) or -z (m odd); the degree-one case has z = 1.
  Poly omega(deg, mpq_class(0));
  if (deg == 1) {
    omega[0] = m == 1 ? -1 : (m == 2 ? -1 : 0);
  } else {
    omega[1] = m % 2 == 0 ? 1 : -1;
  }
  Poly cur(deg, mpq_class(0));
  cur[0] = 1;
  for (int k = 0; k < M; ++k) {
    f->omega_pows_.push_back(cur);
    Poly next = poly_mul(cur, omega);
    next.resize(std::max<size_t>(next.size(), f->phi_.size()), mpq_class(0));
    Poly q = poly_divmod(next, f->phi_);
    (void)q;
    next.resize(deg, mpq_class(0));
    cur = next;
  }
  std::lock_guard<std::mutex> lock(registry_mutex());
  auto [it, inserted] = fields.emplace(m, std::move(f));
  return *it->second;
}

const std::vector<mpq_class>& CycloField::omega_power(long k) const {
  long M = root_order();
  long r = ((k % M) + M) % M;
  return omega_pows_[r];
}

Cyclo::Cyclo() : field_(&CycloField::get(1)), c_(1, mpq_class(0)) {}

Cyclo::Cyclo(long v) : field_(&CycloField::get(1)), c_(1, mpq_class(v)) {}

Cyclo::Cyclo(const mpq_class& v) : field_(&CycloField::get(1)), c_(1, v) { c_[0].canonicalize(); }

Cyclo::Cyclo(const CycloField& field, std::vector<mpq_class> coeffs) : field_(&field) {
  reduce(coeffs);
  c_ = std::move(coeffs);
}

Cyclo Cyclo::zeta_power(const CycloField& field, long k) {
  long m = field.order();
  long r = ((k % m) + m) % m;
  std::vector<mpq_class> p(r + 1, mpq_class(0));
  p[r] = 1;
  return Cyclo(field, std::move(p));
}

Cyclo Cyclo::root_of_unity(const CycloField& field, long k) {
  return Cyclo(field, field.omega_power(k));
}

void Cyclo::reduce(std::vector<mpq_class>& p) {
  const Poly& phi = field_->modulus();
  int deg = field_->degree();
  if (static_cast<int>(p.size()) > deg) {
    for (size_t i = p.size(); i-- > static_cast<size_t>(deg);) {
      if (p[i] == 0) continue;
      mpq_class t = p[i];
      size_t shift = i - deg;
      for (int j = 0; j <= deg; ++j) p[shift + j] -= t * phi[j];
    }
  }
  p.resize(deg, mpq_class(0));
  for (auto& x : p) x.canonicalize();
}

bool Cyclo::is_zero() const {
  for (const auto& x : c_)
    if (x != 0) return false;
  return true;
}

bool Cyclo::is_one() const {
  if (c_[0] != 1) return false;
  for (size_t i = 1; i < c_.size(); ++i)
    if (c_[i] != 0) return false;
  return true;
}

bool Cyclo::is_rational() const {
  for (size_t i = 1; i < c_.size(); ++i)
    if (c_[i] != 0) return false;
  return true;
}

void Cyclo::promote_to(const CycloField& f) {
  mpq_class v = c_[0];
  field_ = &f;
  c_.assign(f.degree(), mpq_class(0));
  c_[0] = v;
}

void Cyclo::align(Cyclo& o) {
  if (field_ == o.field_) return;
  if (o.is_rational()) {
    o.promote_to(*field_);
  } else if (is_rational()) {
    promote_to(*o.field_);
  } else {
    fail(ErrorCode::FieldMismatch, "Q(zeta_" + std::to_string(field_->order()) + ") vs Q(zeta_" +
                                       std::to_string(o.field_->order()) + ")");
  }
}

Cyclo Cyclo::operator-() const {
  Cyclo r = *this;
  for (auto& x : r.c_) x = -x;
  return r;
}

Cyclo& Cyclo::operator+=(const Cyclo& o) {
  if (field_ == o.field_) {
    for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  Cyclo b = o;
  align(b);
  for (size_t i = 0; i < c_.size(); ++i) c_[i] += b.c_[i];
  return *this;
}

Cyclo& Cyclo::operator-=(const Cyclo& o) { return *this += -o; }

Cyclo& Cyclo::operator*=(const Cyclo& o) {
  if (field_ == o.field_ && c_.size() == 1) {
    c_[0] *= o.c_[0];
    return *this;
  }
  Cyclo b = o;
  align(b);
  if (b.is_rational()) {
    for (auto& x : c_) x *= b.c_[0];
    return *this;
  }
  if (is_rational()) {
    mpq_class s = c_[0];
    c_ = b.c_;
    for (auto& x : c_) x *= s;
    return *this;
  }
  Poly p = poly_mul(c_, b.c_);
  reduce(p);
  c_ = std::move(p);
  return *this;
}

bool operator==(const Cyclo& a, const Cyclo& b) {
  if (a.field_ == b.field_) return a.c_ == b.c_;
  if (a.is_rational() && b.is_rational()) return a.c_[0] == b.c_[0];
  return false;
}

Cyclo Cyclo::inverse() const {
  if (is_zero()) fail(ErrorCode::DivisionByZero, "inverse of zero in Q(zeta_" + std::to_string(field_->order()) + ")");
  if (is_rational()) {
    Cyclo r = *this;
    r.c_[0] = 1 / c_[0];
    return r;
  }
  // Extended Euclid in Q[z] against Phi_m.
  Poly r0 = field_->modulus(), r1 = c_;
  trim(r1);
  Poly s0, s1{mpq_class(1)};
  while (!r1.empty()) {
    Poly rem = r0;
    Poly q = poly_divmod(rem, r1);
    Poly qs = poly_mul(q, s1);
    Poly ns = s0;
    if (ns.size() < qs.size()) ns.resize(qs.size(), mpq_class(0));
    for (size_t i = 0; i < qs.size(); ++i) ns[i] -= qs[i];
    trim(ns);
    r0 = std::move(r1);
    r1 = std::move(rem);
    s0 = std::move(s1);
    s1 = std::move(ns);
  }
  // r0 is a nonzero constant since Phi_m is irreducible.
  mpq_class g = r0[0];
  for (auto& x : s0) x /= g;
  return Cyclo(*field_, s0);
}

Cyclo Cyclo::pow(long e) const {
  if (e < 0) return inverse().pow(-e);
  Cyclo base = *this, acc(*field_, {mpq_class(1)});
  while (e > 0) {
    if (e & 1) acc *= base;
    e >>= 1;
    if (e) base *= base;
  }
  return acc;
}

std::optional<long> Cyclo::root_log() const {
  int M = field_->root_order();
  for (long k = 0; k < M; ++k)
    if (field_->omega_power(k) == c_) return k;
  return std::nullopt;
}

std::optional<Cyclo> Cyclo::sqrt() const {
  if (is_zero()) return *this;
  if (is_rational()) {
    mpq_class v = c_[0];
    bool neg = v < 0;
    if (neg) v = -v;
    mpz_class n = v.get_num(), d = v.get_den();
    mpz_class rn = ::sqrt(n), rd = ::sqrt(d);
    if (rn * rn != n || rd * rd != d) return std::nullopt;
    Cyclo r(*field_, {mpq_class(rn, rd)});
    if (!neg) return r;
    int M = field_->root_order();
    if (M % 4 != 0) return std::nullopt;
    return r * root_of_unity(*field_, M / 4);
  }
  auto k = root_log();
  if (!k) return std::nullopt;
  if (*k % 2 == 0) return root_of_unity(*field_, *k / 2);
  return std::nullopt;
}

std::string rational_string(const mpq_class& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

mpq_class parse_rational(const std::string& s) {
  mpq_class q;
  if (q.set_str(s, 10) != 0) fail(ErrorCode::ParseError, "bad rational '" + s + "'");
  q.canonicalize();
  if (q.get_den() == 0) fail(ErrorCode::ParseError, "zero denominator in '" + s + "'");
  return q;
}

std::string Cyclo::to_string() const {
  if (is_rational()) return rational_string(c_[0]);
  std::ostringstream os;
  bool first = true;
  for (size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0) continue;
    if (!first) os << " + ";
    first = false;
    os << rational_string(c_[i]);
    if (i == 1) os << "*z";
    if (i > 1) os << "*z^" << i;
  }
  return os.str();
}

std::vector<std::string> Cyclo::to_strings() const {
  std::vector<std::string> out;
  size_t last = 1;
  for (size_t i = 0; i < c_.size(); ++i)
    if (c_[i] != 0) last = i + 1;
  for (size_t i = 0; i < last; ++i) out.push_back(rational_string(c_[i]));
  return out;
}

Cyclo Cyclo::from_strings(const CycloField& field, const std::vector<std::string>& parts) {
  std::vector<mpq_class> p;
  for (const auto& s : parts) p.push_back(parse_rational(s));
  if (p.empty()) p.push_back(0);
  return Cyclo(field, std::move(p));
}

}  // namespace qtheta
