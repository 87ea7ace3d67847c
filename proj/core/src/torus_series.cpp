#include "qtheta/torus_series.hpp"

#include <atomic>
#include <exception>
#include <thread>

#include "qtheta/error.hpp"

namespace qtheta {

const char* to_string(SeriesKind k) {
  switch (k) {
    case SeriesKind::Algebraic: return "algebraic";
    case SeriesKind::Proper: return "proper";
    case SeriesKind::Formal: return "formal";
  }
  return "?";
}

SeriesImpl::SeriesImpl(QuantParam param, SeriesKind kind, std::optional<Certificate> cert, std::string label)
    : param_(std::move(param)), kind_(kind), cert_(std::move(cert)), label_(std::move(label)) {
  if (kind_ != SeriesKind::Formal && !cert_) fail(ErrorCode::InvalidArgument, "non-formal series needs a certificate");
  if (cert_ && cert_->rank() != param_.rank()) fail(ErrorCode::DimensionMismatch, "certificate rank vs lattice rank");
}

Series SeriesImpl::coefficient(const Vec& h, int64_t order) const {
  if (static_cast<int>(h.size()) != param_.rank())
    fail(ErrorCode::DimensionMismatch, "exponent " + vec_string(h) + " on a lattice of rank " + std::to_string(param_.rank()));
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(h);
    if (it != cache_.end() && it->second.order() >= order) return it->second.truncated(order);
  }
  Series s = compute(h, order);
  std::lock_guard<std::mutex> lock(mu_);
  auto it = cache_.find(h);
  if (it == cache_.end() || it->second.order() < s.order()) cache_[h] = s;
  return s;
}

namespace {

class AlgebraicImpl : public SeriesImpl {
 public:
  AlgebraicImpl(const QuantParam& p, std::map<Vec, Series> terms, std::string label)
      : SeriesImpl(p, SeriesKind::Algebraic, make_cert(p, terms), std::move(label)), terms_(std::move(terms)) {}

  const std::map<Vec, Series>* explicit_terms() const override { return &terms_; }

 protected:
  Series compute(const Vec& h, int64_t order) const override {
    auto it = terms_.find(h);
    if (it == terms_.end()) return Series::zero(order);
    return it->second.truncated(order);
  }

 private:
  static std::map<Vec, Series> clean(std::map<Vec, Series> t) {
    for (auto it = t.begin(); it != t.end();) {
      if (it->second.is_zero() && it->second.is_exact())
        it = t.erase(it);
      else
        ++it;
    }
    return t;
  }
  static Certificate make_cert(const QuantParam& p, std::map<Vec, Series>& terms) {
    terms = clean(std::move(terms));
    std::vector<std::pair<Vec, int64_t>> pts;
    for (const auto& [h, s] : terms) {
      if (static_cast<int>(h.size()) != p.rank()) fail(ErrorCode::DimensionMismatch, "term exponent length");
      pts.emplace_back(h, s.valuation_bound());
    }
    return Certificate::finite(p.rank(), pts);
  }
  std::map<Vec, Series> terms_;
};

class RuleImpl : public SeriesImpl {
 public:
  RuleImpl(const QuantParam& p, SeriesKind kind, std::optional<Certificate> cert,
           std::function<Series(const Vec&, int64_t)> f, std::string label)
      : SeriesImpl(p, kind, std::move(cert), std::move(label)), f_(std::move(f)) {}

 protected:
  Series compute(const Vec& h, int64_t order) const override { return f_(h, order); }

 private:
  std::function<Series(const Vec&, int64_t)> f_;
};

class RecertifiedImpl : public SeriesImpl {
 public:
  RecertifiedImpl(TorusSeries inner, Certificate cert, std::string label)
      : SeriesImpl(inner.param(), inner.kind() == SeriesKind::Formal ? SeriesKind::Proper : inner.kind(),
                   std::move(cert), std::move(label)),
        inner_(std::move(inner)) {}

 protected:
  Series compute(const Vec& h, int64_t order) const override { return inner_.coeff(h, order); }

 private:
  TorusSeries inner_;
};

class ProductImpl : public SeriesImpl {
 public:
  ProductImpl(TorusSeries a, TorusSeries b)
      : SeriesImpl(a.param(), SeriesKind::Proper, Certificate::product(a.certificate(), b.certificate(), a.param()),
                   "(" + a.label() + ")*(" + b.label() + ")"),
        a_(std::move(a)),
        b_(std::move(b)) {}

 protected:
  Series compute(const Vec& h, int64_t N) const override {
    const Certificate& ca = a_.certificate();
    const Certificate& cb = b_.certificate();
    const size_t nb = cb.pieces().size();
    struct Bounds {
      int64_t la, lb;
    };
    std::map<std::pair<Vec, Vec>, Bounds> pairs;
    for (const auto& p : certificate()->fiber(h, N)) {
      int ia = static_cast<int>(p.piece / nb), ib = static_cast<int>(p.piece % nb);
      int ka = ca.pieces()[ia].k();
      Vec za(p.z.begin(), p.z.begin() + ka), zb(p.z.begin() + ka, p.z.end());
      Vec g1 = ca.pieces()[ia].point(za), g2 = cb.pieces()[ib].point(zb);
      int64_t la = ca.lower_bound({ia, za}), lb = cb.lower_bound({ib, zb});
      auto [it, fresh] = pairs.emplace(std::make_pair(g1, g2), Bounds{la, lb});
      if (!fresh) {
        it->second.la = std::min(it->second.la, la);
        it->second.lb = std::min(it->second.lb, lb);
      }
    }
    const QuantParam& P = param();
    Series sum = Series::zero(N);
    for (const auto& [g, bd] : pairs) {
      UnitMonomial av = P.alpha(g.first, g.second);
      int64_t v = av.uexp();
      Series B = b_.coeff(g.second, N - bd.la - v);
      if (B.is_zero()) continue;
      Series A = a_.coeff(g.first, N - *B.valuation() - v);
      if (A.is_zero()) continue;
      sum += Series::mul_upto(A, B, N - v).times(av);
    }
    return sum;
  }

 private:
  TorusSeries a_, b_;
};

class TransformImpl : public SeriesImpl {
 public:
  TransformImpl(TorusSeries f, Vec offset, std::function<UnitMonomial(const Vec&)> mu, const Vec& lambda,
                int64_t kappa, std::string label)
      : SeriesImpl(f.param(), f.kind(),
                   f.has_certificate()
                       ? std::optional<Certificate>(f.certificate().with_linear(lambda, kappa).translated(offset))
                       : std::nullopt,
                   std::move(label)),
        f_(std::move(f)),
        offset_(std::move(offset)),
        mu_(std::move(mu)) {}

 protected:
  Series compute(const Vec& h, int64_t N) const override {
    Vec k = vec_sub(h, offset_);
    UnitMonomial m = mu_(k);
    return f_.coeff(k, N - m.uexp()).times(m);
  }

 private:
  TorusSeries f_;
  Vec offset_;
  std::function<UnitMonomial(const Vec&)> mu_;
};

class PushforwardImpl : public SeriesImpl {
 public:
  PushforwardImpl(TorusSeries f, IntMatrix map, TorusPoint a, const QuantParam& target)
      : SeriesImpl(target, f.kind(),
                   f.has_certificate()
                       ? std::optional<Certificate>(f.certificate().with_linear(a.valuation_vector(), 0).mapped(map))
                       : std::nullopt,
                   "push(" + f.label() + ")"),
        f_(std::move(f)),
        map_(std::move(map)),
        a_(std::move(a)) {
    snf_ = smith_normal_form(map_);
    if (snf_.rank != map_.cols()) fail(ErrorCode::InvalidArgument, "lattice map is not injective");
  }

 protected:
  Series compute(const Vec& h, int64_t N) const override {
    Vec c = snf_.U.apply(h);
    Vec y(map_.cols(), 0);
    for (int i = 0; i < map_.rows(); ++i) {
      if (i < snf_.rank) {
        if (c[i] % snf_.diagonal[i] != 0) return Series::zero(N);
        y[i] = c[i] / snf_.diagonal[i];
      } else if (c[i] != 0) {
        return Series::zero(N);
      }
    }
    Vec src = snf_.V.apply(y);
    UnitMonomial ah = a_.eval(src);
    return f_.coeff(src, N - ah.uexp()).times(ah);
  }

 private:
  TorusSeries f_;
  IntMatrix map_;
  TorusPoint a_;
  SmithForm snf_;
};

class ExternalImpl : public SeriesImpl {
 public:
  ExternalImpl(TorusSeries a, TorusSeries b)
      : SeriesImpl(a.param().direct_sum(b.param()),
                   (a.kind() == SeriesKind::Formal || b.kind() == SeriesKind::Formal)
                       ? SeriesKind::Formal
                       : (a.kind() == SeriesKind::Algebraic && b.kind() == SeriesKind::Algebraic ? SeriesKind::Algebraic
                                                                                               : SeriesKind::Proper),
                   (a.has_certificate() && b.has_certificate())
                       ? std::optional<Certificate>(Certificate::external(a.certificate(), b.certificate()))
                       : std::nullopt,
                   a.label() + "[x]" + b.label()),
        a_(std::move(a)),
        b_(std::move(b)) {}

 protected:
  Series compute(const Vec& hg, int64_t N) const override {
    int d1 = a_.param().rank();
    Vec h(hg.begin(), hg.begin() + d1), g(hg.begin() + d1, hg.end());
    Series A = a_.coeff(h, N), B = b_.coeff(g, N);
    int64_t va = A.valuation_bound(), vb = B.valuation_bound();
    if (vb < 0) A = a_.coeff(h, N - vb);
    if (va < 0) B = b_.coeff(g, N - va);
    return Series::mul_upto(A, B, N);
  }

 private:
  TorusSeries a_, b_;
};

}  // namespace

TorusSeries TorusSeries::algebraic(const QuantParam& param, std::map<Vec, Series> terms, std::string label) {
  return TorusSeries(std::make_shared<AlgebraicImpl>(param, std::move(terms), std::move(label)));
}

TorusSeries TorusSeries::monomial(const QuantParam& param, const Vec& h, const UnitMonomial& c) {
  return algebraic(param, {{h, Series(c)}}, c.to_string() + "e" + vec_string(h));
}

TorusSeries TorusSeries::one(const QuantParam& param) { return monomial(param, Vec(param.rank(), 0)); }

TorusSeries TorusSeries::rule(const QuantParam& param, SeriesKind kind, std::optional<Certificate> cert,
                              std::function<Series(const Vec&, int64_t)> coeff, std::string label) {
  if (kind == SeriesKind::Algebraic) fail(ErrorCode::InvalidArgument, "algebraic series are built from explicit terms");
  if (kind == SeriesKind::Formal) cert.reset();
  return TorusSeries(std::make_shared<RuleImpl>(param, kind, std::move(cert), std::move(coeff), std::move(label)));
}

const QuantParam& TorusSeries::param() const { return impl_->param(); }
SeriesKind TorusSeries::kind() const { return impl_->kind(); }
const std::string& TorusSeries::label() const { return impl_->label(); }
bool TorusSeries::has_certificate() const { return impl_->certificate().has_value(); }

const Certificate& TorusSeries::certificate() const {
  if (!impl_->certificate()) fail(ErrorCode::NotMultipliable, "series '" + label() + "' is formal (no certificate)");
  return *impl_->certificate();
}

const std::map<Vec, Series>& TorusSeries::terms() const {
  const auto* t = impl_->explicit_terms();
  if (!t) fail(ErrorCode::InvalidArgument, "series '" + label() + "' has no explicit term list");
  return *t;
}

Series TorusSeries::coeff(const Vec& h, int64_t order) const { return impl_->coefficient(h, order); }

std::vector<Vec> TorusSeries::enumerate(int64_t N) const { return certificate().enumerate(N); }

TorusSeries TorusSeries::with_certificate(Certificate cert, std::string label) const {
  if (label.empty()) label = this->label();
  return TorusSeries(std::make_shared<RecertifiedImpl>(*this, std::move(cert), std::move(label)));
}

TorusSeries multiply(const TorusSeries& a, const TorusSeries& b) {
  require_same_param(a.param(), b.param(), "torus_series_mul");
  if (a.kind() == SeriesKind::Formal || b.kind() == SeriesKind::Formal)
    fail(ErrorCode::NotMultipliable, "operand '" + (a.kind() == SeriesKind::Formal ? a.label() : b.label()) +
                                         "' is formal-only");
  if (a.kind() == SeriesKind::Algebraic && b.kind() == SeriesKind::Algebraic) {
    std::map<Vec, Series> out;
    for (const auto& [g1, s1] : a.terms())
      for (const auto& [g2, s2] : b.terms()) {
        Series t = (s1 * s2).times(a.param().alpha(g1, g2));
        Vec h = vec_add(g1, g2);
        auto it = out.find(h);
        if (it == out.end())
          out.emplace(h, t);
        else
          it->second += t;
      }
    return TorusSeries::algebraic(a.param(), std::move(out), "(" + a.label() + ")*(" + b.label() + ")");
  }
  return TorusSeries(std::make_shared<ProductImpl>(a, b));
}

TorusSeries add(const TorusSeries& a, const TorusSeries& b) {
  require_same_param(a.param(), b.param(), "series sum");
  if (a.kind() == SeriesKind::Algebraic && b.kind() == SeriesKind::Algebraic) {
    std::map<Vec, Series> out = a.terms();
    for (const auto& [h, s] : b.terms()) {
      auto it = out.find(h);
      if (it == out.end())
        out.emplace(h, s);
      else
        it->second += s;
    }
    return TorusSeries::algebraic(a.param(), std::move(out), a.label() + "+" + b.label());
  }
  SeriesKind kind = (a.kind() == SeriesKind::Formal || b.kind() == SeriesKind::Formal) ? SeriesKind::Formal
                                                                                      : SeriesKind::Proper;
  std::optional<Certificate> cert;
  if (kind != SeriesKind::Formal) {
    std::vector<CertPiece> pieces = a.certificate().pieces();
    for (const auto& p : b.certificate().pieces()) pieces.push_back(p);
    cert = Certificate(a.param().rank(), std::move(pieces));
  }
  return TorusSeries::rule(
      a.param(), kind, cert, [a, b](const Vec& h, int64_t N) { return a.coeff(h, N) + b.coeff(h, N); },
      a.label() + "+" + b.label());
}

TorusSeries scale(const TorusSeries& f, const UnitMonomial& c) {
  return monomial_transform(
      f, Vec(f.param().rank(), 0), [c](const Vec&) { return c; }, Vec(f.param().rank(), 0), c.uexp(),
      c.to_string() + "*" + f.label());
}

TorusSeries rename_param(const TorusSeries& f, const QuantParam& target) {
  if (target.rank() != f.param().rank()) fail(ErrorCode::LatticeMismatch, "renaming across lattices of different rank");
  if (f.kind() == SeriesKind::Algebraic) return TorusSeries::algebraic(target, f.terms(), f.label());
  std::optional<Certificate> cert;
  if (f.has_certificate()) cert = f.certificate();
  return TorusSeries::rule(
      target, f.kind(), cert, [f](const Vec& h, int64_t N) { return f.coeff(h, N); }, f.label());
}

TorusSeries monomial_transform(const TorusSeries& f, const Vec& offset, std::function<UnitMonomial(const Vec&)> mu,
                               const Vec& lambda, int64_t kappa, std::string label) {
  if (f.kind() == SeriesKind::Algebraic) {
    std::map<Vec, Series> out;
    for (const auto& [k, s] : f.terms()) out.emplace(vec_add(k, offset), s.times(mu(k)));
    return TorusSeries::algebraic(f.param(), std::move(out), std::move(label));
  }
  return TorusSeries(std::make_shared<TransformImpl>(f, offset, std::move(mu), lambda, kappa, std::move(label)));
}

TorusSeries shift_pullback(const TorusPoint& x, const TorusSeries& f) {
  if (x.rank() != f.param().rank()) fail(ErrorCode::DimensionMismatch, "shift point rank");
  return monomial_transform(
      f, Vec(x.rank(), 0), [x](const Vec& k) { return x.eval(k); }, x.valuation_vector(), 0,
      "shift" + x.to_string() + "(" + f.label() + ")");
}

TorusSeries lattice_pushforward(const TorusSeries& f, const IntMatrix& map, const TorusPoint& a,
                                const QuantParam& target) {
  if (map.cols() != f.param().rank() || map.rows() != target.rank() || a.rank() != f.param().rank())
    fail(ErrorCode::DimensionMismatch, "lattice map shape");
  if (f.kind() == SeriesKind::Algebraic) {
    if (matrix_rank(map) != map.cols()) fail(ErrorCode::InvalidArgument, "lattice map is not injective");
    std::map<Vec, Series> out;
    for (const auto& [h, s] : f.terms()) out.emplace(map.apply(h), s.times(a.eval(h)));
    return TorusSeries::algebraic(target, std::move(out), "push(" + f.label() + ")");
  }
  return TorusSeries(std::make_shared<PushforwardImpl>(f, map, a, target));
}

TorusSeries external_product(const TorusSeries& a, const TorusSeries& b) {
  if (a.kind() == SeriesKind::Algebraic && b.kind() == SeriesKind::Algebraic) {
    std::map<Vec, Series> out;
    for (const auto& [h, s] : a.terms())
      for (const auto& [g, t] : b.terms()) out.emplace(vec_concat(h, g), s * t);
    return TorusSeries::algebraic(a.param().direct_sum(b.param()), std::move(out), a.label() + "[x]" + b.label());
  }
  return TorusSeries(std::make_shared<ExternalImpl>(a, b));
}

bool conjugation_check(const QuantParam& param, const Vec& h, const TorusSeries& f) {
  if (f.kind() != SeriesKind::Algebraic) fail(ErrorCode::InvalidArgument, "conjugation_check needs an algebraic series");
  require_same_param(param, f.param(), "conjugation_check");
  TorusSeries left = TorusSeries::monomial(param, h);
  TorusSeries right_inv = TorusSeries::monomial(param, vec_neg(h), UnitMonomial::sign(param.epsilon(h)));
  TorusSeries conj = multiply(multiply(left, f), right_inv);
  TorusSeries shifted = shift_pullback(param.hidden_point(h).pow(-2), f);
  const auto& a = conj.terms();
  const auto& b = shifted.terms();
  if (a.size() != b.size()) return false;
  for (const auto& [k, s] : a) {
    auto it = b.find(k);
    if (it == b.end() || it->second != s) return false;
  }
  return true;
}

std::vector<Vec> window_points(int rank, int R) {
  std::vector<Vec> out;
  Vec cur(rank, -R);
  if (rank == 0) return {Vec{}};
  for (;;) {
    out.push_back(cur);
    int i = rank - 1;
    for (; i >= 0; --i) {
      if (++cur[i] <= R) break;
      cur[i] = -R;
    }
    if (i < 0) break;
  }
  return out;
}

void for_each_cell(const std::vector<Vec>& cells, int jobs, const std::function<void(size_t)>& body) {
  if (jobs <= 1 || cells.size() < 2) {
    for (size_t i = 0; i < cells.size(); ++i) body(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t)
    pool.emplace_back([&] {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= cells.size()) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!err) err = std::current_exception();
          next = cells.size();
          return;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

WindowTable evaluate(const TorusSeries& f, int R, int64_t order, int jobs) {
  WindowTable t;
  t.R = R;
  t.order = order;
  std::vector<Vec> pts = window_points(f.param().rank(), R);
  std::vector<Series> vals(pts.size());
  for_each_cell(pts, jobs, [&](size_t i) { vals[i] = f.coeff(pts[i], order); });
  for (size_t i = 0; i < pts.size(); ++i) t.cells.emplace_back(pts[i], std::move(vals[i]));
  return t;
}

}  // namespace qtheta
