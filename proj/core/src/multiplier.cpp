#include "qtheta/multiplier.hpp"

#include <atomic>
#include <mutex>
#include <sstream>

#include "qtheta/error.hpp"

namespace qtheta {

namespace {

UnitMonomial bilinear(const PairingMatrix& m, const Vec& b1, const Vec& b2) {
  UnitMonomial r;
  for (size_t i = 0; i < b1.size(); ++i)
    for (size_t j = 0; j < b2.size(); ++j)
      if (b1[i] * b2[j] != 0) r *= m[i][j].pow(b1[i] * b2[j]);
  return r;
}

void check_b(const Multiplier& L, const Vec& b) {
  if (static_cast<int>(b.size()) != L.rank_B())
    fail(ErrorCode::DimensionMismatch, "vector " + vec_string(b) + " is not in B = Z^" + std::to_string(L.rank_B()));
}

// Solve phi(x') = x for phi(x')_j = prod_i x'_i^{f_ij}, through the Smith form of f^T.
TorusPoint lift_point(const TorusMorphism& F, const TorusPoint& x) {
  IntMatrix M = F.f().transpose();  // rows: source rank, cols: target rank
  SmithForm s = smith_normal_form(M);
  int rows = M.rows(), cols = M.cols();
  std::vector<UnitMonomial> w(rows);
  for (int k = 0; k < rows; ++k)
    for (int j = 0; j < rows; ++j)
      if (s.U.at(k, j) != 0) w[k] *= x[j].pow(s.U.at(k, j));
  std::vector<UnitMonomial> y(cols);
  for (int k = 0; k < rows; ++k) {
    if (k < s.rank) {
      auto r = w[k].root(s.diagonal[k]);
      if (!r) fail(ErrorCode::NoLift, "no " + std::to_string(s.diagonal[k]) + "-th root of " + w[k].to_string());
      y[k] = *r;
    } else if (!w[k].is_one()) {
      fail(ErrorCode::NoLift, "point " + x.to_string() + " is not in the image of phi");
    }
  }
  std::vector<UnitMonomial> out(cols);
  for (int i = 0; i < cols; ++i)
    for (int k = 0; k < cols; ++k)
      if (s.V.at(i, k) != 0) out[i] *= y[k].pow(s.V.at(i, k));
  TorusPoint res(out);
  if (F.induced_point(res) != x) fail(ErrorCode::NoLift, "lift of " + x.to_string() + " failed");
  return res;
}

std::optional<PairingMatrix> sqrt_times(const std::optional<PairingMatrix>& s, const PairingMatrix& ratio) {
  if (!s) return std::nullopt;
  PairingMatrix out = *s;
  for (size_t i = 0; i < out.size(); ++i)
    for (size_t j = 0; j < out.size(); ++j) {
      auto r = ratio[i][j].sqrt();
      if (!r) return std::nullopt;
      out[i][j] *= *r;
    }
  // keep the choice symmetric
  for (size_t i = 0; i < out.size(); ++i)
    for (size_t j = 0; j < i; ++j) out[i][j] = out[j][i];
  return out;
}

}  // namespace

Multiplier::Multiplier(QuantParam param, std::vector<HeisElement> images, std::optional<PairingMatrix> sqrt)
    : param_(std::move(param)), images_(std::move(images)), sqrt_(std::move(sqrt)) {
  int d = param_.rank(), r = rank_B();
  std::vector<Vec> cols;
  for (const auto& im : images_) {
    require_same_param(param_, im.param(), "multiplier image");
    cols.push_back(im.h_l());
  }
  hminus_ = IntMatrix::from_columns(d, cols);
  gram_.assign(r, std::vector<UnitMonomial>(r));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) gram_[i][j] = images_[i].x_l().eval(cols[j]) * param_.alpha(cols[i], cols[j]);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < i; ++j)
      if (gram_[i][j] != gram_[j][i])
        fail(ErrorCode::NonSymmetricPairing, "<e" + std::to_string(i) + ",e" + std::to_string(j) +
                                                 "> = " + gram_[i][j].to_string() + " but the transpose is " +
                                                 gram_[j][i].to_string());
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < i; ++j)
      if (images_[i] * images_[j] != images_[j] * images_[i])
        fail(ErrorCode::CocycleFailure, "images of e" + std::to_string(i) + " and e" + std::to_string(j) +
                                            " do not commute");
  if (sqrt_) {
    if (static_cast<int>(sqrt_->size()) != r)
      fail(ErrorCode::DimensionMismatch, "square root matrix has the wrong size");
    for (int i = 0; i < r; ++i) {
      if (static_cast<int>((*sqrt_)[i].size()) != r)
        fail(ErrorCode::DimensionMismatch, "square root matrix has the wrong size");
      for (int j = 0; j < r; ++j) {
        if ((*sqrt_)[i][j] != (*sqrt_)[j][i]) fail(ErrorCode::SqrtMismatch, "square root is not symmetric");
        if ((*sqrt_)[i][j].pow(2) != gram_[i][j])
          fail(ErrorCode::SqrtMismatch, "(e" + std::to_string(i) + ",e" + std::to_string(j) + ")^2 = " +
                                            (*sqrt_)[i][j].pow(2).to_string() + " but <,> = " +
                                            gram_[i][j].to_string());
      }
    }
  }
}

const PairingMatrix& Multiplier::sqrt_pairing() const {
  if (!sqrt_) fail(ErrorCode::SqrtMismatch, "no square root of the structure pairing was chosen");
  return *sqrt_;
}

TorusPoint Multiplier::x_l(const Vec& b) const {
  check_b(*this, b);
  TorusPoint x = TorusPoint::identity(param_.rank());
  for (int i = 0; i < rank_B(); ++i)
    if (b[i] != 0) x = x * images_[i].x_l().pow(b[i]);
  return x;
}

TorusPoint Multiplier::x_r(const Vec& b) const { return image(b).x_r(); }

UnitMonomial Multiplier::c_l(const Vec& b) const {
  check_b(*this, b);
  int r = rank_B();
  UnitMonomial c;
  for (int i = 0; i < r; ++i) {
    if (b[i] == 0) continue;
    c *= images_[i].c_l().pow(b[i]);
    int64_t tri = b[i] * (b[i] - 1) / 2;
    if (tri != 0) c *= gram_[i][i].pow(tri);
    for (int j = i + 1; j < r; ++j)
      if (b[j] != 0) c *= gram_[i][j].pow(b[i] * b[j]);
  }
  return c;
}

HeisElement Multiplier::image(const Vec& b) const { return HeisElement(param_, c_l(b), x_l(b), h_l(b)); }

UnitMonomial Multiplier::pairing(const Vec& b1, const Vec& b2) const {
  check_b(*this, b1);
  check_b(*this, b2);
  Vec h1 = h_l(b1), h2 = h_l(b2);
  return x_l(b1).eval(h2) * param_.alpha(h1, h2);
}

UnitMonomial Multiplier::sqrt_value(const Vec& b1, const Vec& b2) const {
  check_b(*this, b1);
  check_b(*this, b2);
  return bilinear(sqrt_pairing(), b1, b2);
}

IntMatrix Multiplier::valuation_form() const {
  int r = rank_B();
  IntMatrix P(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) P.at(i, j) = gram_[i][j].uexp();
  return P;
}

std::string Multiplier::to_string() const {
  std::ostringstream os;
  os << "Multiplier over " << param_.to_string() << " {";
  for (int i = 0; i < rank_B(); ++i) os << (i ? ", " : "") << "e" << i << " -> " << images_[i].to_string();
  os << "}";
  return os.str();
}

UnitMonomial structure_pairing(const Multiplier& L, const Vec& b1, const Vec& b2) { return L.pairing(b1, b2); }

AutomorphyFactors automorphy_factors(const Multiplier& L) {
  AutomorphyFactors a;
  a.sqrt = L.sqrt_pairing();
  for (int i = 0; i < L.rank_B(); ++i) {
    const auto& im = L.images()[i];
    UnitMonomial psi = im.c_l() * a.sqrt[i][i].inverse();
    a.psi_l.push_back(psi);
    a.psi_r.push_back(psi * UnitMonomial::sign(L.param().epsilon(im.h_l())));
    a.x_l.push_back(im.x_l());
    a.x_r.push_back(im.x_r());
    a.h_l.push_back(im.h_l());
    a.h_r.push_back(im.h_r());
  }
  return a;
}

bool is_symmetric(const Multiplier& L) {
  // c_{l,b} = c_{l,-b} for all b iff c_i^2 = <e_i, e_i> on generators
  for (int i = 0; i < L.rank_B(); ++i) {
    Vec e(L.rank_B(), 0);
    e[i] = 1;
    if (L.images()[i].c_l().pow(2) != L.pairing(e, e)) return false;
  }
  return true;
}

bool is_ample(const Multiplier& L) {
  if (!L.quotient().finite()) return false;
  return is_positive_definite(to_rational(L.valuation_form()));
}

Multiplier restrict(const Multiplier& L, const IntMatrix& m) {
  if (m.rows() != L.rank_B()) fail(ErrorCode::DimensionMismatch, "restriction map has the wrong shape");
  std::vector<HeisElement> ims;
  for (int k = 0; k < m.cols(); ++k) ims.push_back(L.image(m.col(k)));
  std::optional<PairingMatrix> s;
  if (L.has_sqrt()) {
    s = PairingMatrix(m.cols(), std::vector<UnitMonomial>(m.cols()));
    for (int k = 0; k < m.cols(); ++k)
      for (int l = 0; l < m.cols(); ++l) (*s)[k][l] = L.sqrt_value(m.col(k), m.col(l));
  }
  return Multiplier(L.param(), std::move(ims), std::move(s));
}

ThetaBasis theta_dim_basis(const Multiplier& L, bool strict) {
  const QuantParam& p = L.param();
  int d = p.rank();
  QuotientData Q = L.quotient();
  if (!Q.finite()) fail(ErrorCode::InfiniteIndex, "h^-(B) has infinite index in H");

  // B' complementary to the kernel of h^-, mapped isomorphically onto h^-(B)
  SmithForm s = smith_normal_form(L.h_minus());
  int r = L.rank_B();
  std::vector<Vec> bcols, kcols;
  for (int k = 0; k < r; ++k) (k < s.rank ? bcols : kcols).push_back(s.V.col(k));
  Multiplier Lp = restrict(L, IntMatrix::from_columns(r, bcols));

  ThetaBasis out{Lp, 0, *Q.index(), {}, {}, {}};
  out.multiplier = L;
  bool ample = is_ample(Lp);

  IntMatrix H = Lp.h_minus();  // d x d, nonsingular
  RatMatrix Hinv = rat_inverse(to_rational(H));
  IntMatrix P = Lp.valuation_form();
  IntMatrix X = IntMatrix::from_columns(d, [&] {
    std::vector<Vec> v;
    for (const auto& im : Lp.images()) v.push_back(im.x_l().valuation_vector());
    return v;
  }());
  IntMatrix HtA = H.transpose() * p.A();

  for (const Vec& j : Q.coset_reps()) {
    bool ok = true;
    for (const Vec& kv : kcols) {
      HeisElement k = L.image(kv);
      if (!action_factor(p, k.left(), j).is_one()) ok = false;
    }
    if (!ok) {
      out.inconsistent.push_back(j);
      continue;
    }
    auto coeff = [Lp, Q, Hinv, j, d](const Vec& h, int64_t N) -> Series {
      if (Q.reduce(h) != j) return Series::zero(N);
      Vec diff = vec_sub(j, h);
      Vec b(d);
      for (int i = 0; i < d; ++i) {
        mpq_class v = 0;
        for (int k = 0; k < d; ++k) v += Hinv[i][k] * diff[k];
        if (v.get_den() != 1) fail(ErrorCode::InvalidArgument, "coset solve is not integral");
        b[i] = checked_int64(v.get_num());
      }
      UnitMonomial f = action_factor(Lp.param(), Lp.image(b).left(), h);
      return Series(f.inverse()).truncated(N);
    };
    std::optional<Certificate> cert;
    if (ample) {
      Quadratic qd;
      qd.P.assign(d, std::vector<mpq_class>(d));
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) qd.P[a][b] = mpq_class(P.at(a, b), 2);
      Vec xj = X.transpose().apply(j), aj = HtA.apply(j);
      qd.l.resize(d);
      for (int i = 0; i < d; ++i) {
        mpq_class lin = mpq_class(Lp.images()[i].c_l().uexp()) - mpq_class(P.at(i, i), 2) + xj[i] + aj[i];
        lin.canonicalize();
        qd.l[i] = -lin;
      }
      qd.c = 0;
      IntMatrix gens = H.scaled(-1);
      cert = Certificate(d, {CertPiece{j, gens, std::vector<bool>(d, false), {qd}}});
    }
    out.cosets.push_back(j);
    out.basis.push_back(TorusSeries::rule(p, ample ? SeriesKind::Proper : SeriesKind::Formal, cert, coeff,
                                          "theta[" + vec_string(j) + "]"));
  }
  out.dim = static_cast<int>(out.basis.size());
  if (strict && !out.inconsistent.empty())
    fail(ErrorCode::InconsistentRecurrence, "the recurrence is overdetermined and inconsistent on coset " +
                                                vec_string(out.inconsistent.front()));
  return out;
}

MembershipReport check_theta(const Multiplier& L, const TorusSeries& theta, int R, int64_t order, int jobs) {
  require_same_param(L.param(), theta.param(), "check_theta");
  MembershipReport rep;
  std::vector<Vec> cells = window_points(L.param().rank(), R);
  std::mutex mu;
  for (int i = 0; i < L.rank_B() && rep.ok; ++i) {
    for (int side = 0; side < 2 && rep.ok; ++side) {
      const HeisElement& im = L.images()[i];
      TorusSeries moved = heis_act(L.param(), side == 0 ? im.left() : im.right(), theta);
      std::atomic<bool> bad{false};
      size_t bad_at = cells.size();
      for_each_cell(cells, jobs, [&](size_t c) {
        if (bad.load()) return;
        if (!moved.coeff(cells[c], order).agrees_upto(theta.coeff(cells[c], order), order)) {
          std::lock_guard<std::mutex> lk(mu);
          bad = true;
          bad_at = std::min(bad_at, c);
        }
      });
      rep.cells += static_cast<int64_t>(cells.size());
      if (bad) {
        rep.ok = false;
        rep.bad_cell = cells[bad_at];
        rep.bad_generator = i;
        rep.side = side == 0 ? "left" : "right";
      }
    }
  }
  return rep;
}

Multiplier power(const Multiplier& L, int64_t n, const QuantParam& target) {
  if (n <= 0) fail(ErrorCode::InvalidArgument, "power needs n >= 1");
  if (target.power(n) != L.param())
    fail(ErrorCode::ParamMismatch, "L must live over alpha^" + std::to_string(n) + " of the target");
  std::vector<HeisElement> ims;
  for (const auto& im : L.images()) ims.push_back(psi_dn(n, n, im, target));
  std::optional<PairingMatrix> s;
  if (L.has_sqrt()) {
    s = L.sqrt_pairing();
    for (auto& row : *s)
      for (auto& v : row) v = v.pow(n);
  }
  return Multiplier(target, std::move(ims), std::move(s));
}

Multiplier power(const Multiplier& L, int64_t n) {
  if (L.param().power(n) != L.param())
    fail(ErrorCode::ParamMismatch, "alpha^n differs from alpha; give the target parameter explicitly");
  return power(L, n, L.param());
}

Multiplier boxtimes(const Multiplier& a, const Multiplier& b) {
  QuantParam p = a.param().direct_sum(b.param());
  int da = a.param().rank(), db = b.param().rank();
  std::vector<HeisElement> ims;
  auto pad = [](const TorusPoint& x, int before, int after) {
    std::vector<UnitMonomial> v(before);
    v.insert(v.end(), x.values().begin(), x.values().end());
    v.resize(v.size() + after);
    return TorusPoint(v);
  };
  for (const auto& im : a.images())
    ims.emplace_back(p, im.c_l(), pad(im.x_l(), 0, db), vec_concat(im.h_l(), Vec(db, 0)));
  for (const auto& im : b.images())
    ims.emplace_back(p, im.c_l(), pad(im.x_l(), da, 0), vec_concat(Vec(da, 0), im.h_l()));
  std::optional<PairingMatrix> s;
  if (a.has_sqrt() && b.has_sqrt()) {
    int ra = a.rank_B(), r = ra + b.rank_B();
    s = PairingMatrix(r, std::vector<UnitMonomial>(r));
    for (int i = 0; i < ra; ++i)
      for (int j = 0; j < ra; ++j) (*s)[i][j] = a.sqrt_pairing()[i][j];
    for (int i = ra; i < r; ++i)
      for (int j = ra; j < r; ++j) (*s)[i][j] = b.sqrt_pairing()[i - ra][j - ra];
  }
  return Multiplier(p, std::move(ims), std::move(s));
}

Multiplier pullback(const TorusMorphism& F, const Multiplier& L) {
  require_same_param(F.source(), L.param(), "pullback");
  std::vector<HeisElement> ims;
  for (const auto& im : L.images())
    ims.emplace_back(F.target(), im.c_l() * F.a().eval(im.h_l()), lift_point(F, im.x_l()), F.f().apply(im.h_l()));
  Multiplier bare(F.target(), ims);
  if (!L.has_sqrt()) return bare;
  int r = L.rank_B();
  PairingMatrix ratio(r, std::vector<UnitMonomial>(r));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      Vec ei(r, 0), ej(r, 0);
      ei[i] = 1;
      ej[j] = 1;
      ratio[i][j] = bare.pairing(ei, ej) * L.pairing(ei, ej).inverse();
    }
  return Multiplier(F.target(), std::move(ims), sqrt_times(L.sqrt_pairing(), ratio));
}

bool composable(const Multiplier& outer, const Multiplier& inner) {
  if (outer.param() != inner.param() || outer.rank_B() != inner.rank_B()) return false;
  for (int i = 0; i < outer.rank_B(); ++i)
    if (!composable(outer.images()[i], inner.images()[i])) return false;
  return true;
}

UnitMonomial composed_pairing(const Multiplier& outer, const Multiplier& inner, const Vec& b1, const Vec& b2) {
  const QuantParam& p = outer.param();
  Vec h1i = inner.h_l(b1), h2i = inner.h_l(b2), h1o = outer.h_l(b1), h2o = outer.h_l(b2);
  return outer.pairing(b1, b2) * inner.pairing(b1, b2) * p.alpha(h2i, h1o) * p.alpha(h1i, h2o);
}

Multiplier compose(const Multiplier& outer, const Multiplier& inner) {
  if (!composable(outer, inner))
    fail(ErrorCode::NotComposable, "right periods of the outer multiplier differ from left periods of the inner");
  std::vector<HeisElement> ims;
  for (int i = 0; i < outer.rank_B(); ++i) ims.push_back(compose(outer.images()[i], inner.images()[i]));
  std::optional<PairingMatrix> s;
  if (outer.has_sqrt() && inner.has_sqrt()) {
    int r = outer.rank_B();
    PairingMatrix base(r, std::vector<UnitMonomial>(r)), cross(r, std::vector<UnitMonomial>(r));
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) {
        Vec ei(r, 0), ej(r, 0);
        ei[i] = 1;
        ej[j] = 1;
        base[i][j] = outer.sqrt_pairing()[i][j] * inner.sqrt_pairing()[i][j];
        cross[i][j] = composed_pairing(outer, inner, ei, ej) * outer.pairing(ei, ej).inverse() *
                      inner.pairing(ei, ej).inverse();
      }
    s = sqrt_times(base, cross);
  }
  return Multiplier(outer.param(), std::move(ims), std::move(s));
}

TorusSeries theta_product(const Multiplier& outer, const Multiplier& inner, const TorusSeries& th_outer,
                          const TorusSeries& th_inner) {
  if (!composable(outer, inner)) fail(ErrorCode::NotComposable, "theta_product of non-composable multipliers");
  return multiply(th_inner, th_outer);
}

UnitMonomial hidden_form(const QuantParam& p, const Vec& hl1, const Vec& hr1, const Vec& hl2, const Vec& hr2) {
  return p.alpha(hl1, hl2) * p.alpha(hr1, hr2).inverse();
}

Multiplier hidden_from_morphism(const QuantParam& p, const IntMatrix& hl, const IntMatrix& f,
                                const std::vector<UnitMonomial>& chi) {
  int d = p.rank();
  if (hl.rows() != d || f.rows() != d || f.cols() != d || static_cast<int>(chi.size()) != hl.cols())
    fail(ErrorCode::DimensionMismatch, "hidden period data has the wrong shape");
  int r = hl.cols();
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      UnitMonomial v = hidden_form(p, hl.col(i), f.apply(hl.col(i)), hl.col(j), f.apply(hl.col(j)));
      if (v.uexp() != 0 || !(v.coeff() == Cyclo(1) || v.coeff() == Cyclo(-1)))
        fail(ErrorCode::IncompatibleForm, "{e" + std::to_string(i) + ",e" + std::to_string(j) + "} = " +
                                              v.to_string() + " is not a sign");
    }
  std::vector<HeisElement> ims;
  for (int i = 0; i < r; ++i) {
    Vec h = hl.col(i);
    ims.push_back(HeisElement::from_raw(p, HeisRaw{chi[i], TorusPoint::identity(d), h, f.apply(h)}));
  }
  return Multiplier(p, std::move(ims));
}

Multiplier twist(const Multiplier& L, const QuantParam& target) {
  std::vector<HeisElement> ims;
  for (const auto& im : L.images()) ims.push_back(twist(L.param(), target, im));
  std::optional<PairingMatrix> s;
  if (L.has_sqrt()) s = L.sqrt_pairing();
  return Multiplier(target, std::move(ims), std::move(s));
}

PeriodMap left_periods(const Multiplier& L) {
  PeriodMap m;
  for (const auto& im : L.images()) m.push_back(im.x_l());
  return m;
}

PeriodMap right_periods(const Multiplier& L) {
  PeriodMap m;
  for (const auto& im : L.images()) m.push_back(im.x_r());
  return m;
}

std::vector<Multiplier> pic_hom(const PeriodMap& xi, const PeriodMap& eta, const std::vector<Multiplier>& candidates,
                                bool pic_mode) {
  std::vector<Multiplier> out;
  for (const auto& L : candidates) {
    if (right_periods(L) != xi || left_periods(L) != eta) continue;
    if (pic_mode && !is_ample(L)) continue;
    out.push_back(L);
  }
  return out;
}

}  // namespace qtheta
