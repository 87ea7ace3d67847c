#include "qtheta/certificate.hpp"

#include <cmath>
#include <set>

#include "qtheta/error.hpp"

namespace qtheta {

Quadratic Quadratic::zero(int k) {
  Quadratic q;
  q.P.assign(k, std::vector<mpq_class>(k, 0));
  q.l.assign(k, 0);
  q.c = 0;
  return q;
}

Quadratic Quadratic::constant(int k, const mpq_class& c) {
  Quadratic q = zero(k);
  q.c = c;
  return q;
}

mpq_class Quadratic::eval(const Vec& z) const {
  mpq_class s = c;
  for (int i = 0; i < k(); ++i) {
    if (z[i] == 0) continue;
    mpq_class row = l[i];
    for (int j = 0; j < k(); ++j)
      if (z[j] != 0) row += P[i][j] * static_cast<long>(z[j]);
    s += row * static_cast<long>(z[i]);
  }
  return s;
}

Vec CertPiece::point(const Vec& z) const { return vec_add(base, gens.apply(z)); }

namespace {

// Integer rendering den * Q for fast exact comparisons.
struct ScaledQ {
  int k = 0;
  std::vector<int64_t> P, l;
  int64_t c = 0, den = 1;

  __int128 eval(const Vec& z) const {
    __int128 s = c;
    for (int i = 0; i < k; ++i) {
      if (z[i] == 0) continue;
      __int128 row = l[i];
      for (int j = 0; j < k; ++j) row += static_cast<__int128>(P[static_cast<size_t>(i) * k + j]) * z[j];
      s += row * z[i];
    }
    return s;
  }
  bool within(const Vec& z, int64_t N) const { return eval(z) <= static_cast<__int128>(den) * N; }
  int64_t ceil_value(const Vec& z) const {
    __int128 v = eval(z);
    __int128 q = v / den;
    if (v % den != 0 && v > 0) ++q;
    return static_cast<int64_t>(q);
  }
};

ScaledQ scale(const Quadratic& q) {
  mpz_class den = q.c.get_den();
  for (const auto& r : q.P)
    for (const auto& x : r) den = lcm(den, x.get_den());
  for (const auto& x : q.l) den = lcm(den, x.get_den());
  ScaledQ s;
  s.k = q.k();
  s.den = checked_int64(den);
  auto conv = [&](const mpq_class& x) {
    mpq_class y = x * den;
    return checked_int64(y.get_num());
  };
  for (const auto& r : q.P)
    for (const auto& x : r) s.P.push_back(conv(x));
  for (const auto& x : q.l) s.l.push_back(conv(x));
  s.c = conv(q.c);
  return s;
}

mpq_class floor_q(const mpq_class& x) {
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return mpq_class(f);
}

struct Interval {
  mpq_class lo, hi;
};

Interval mul_iv(const Interval& a, const Interval& b) {
  mpq_class p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  Interval r{p[0], p[0]};
  for (auto& x : p) {
    if (x < r.lo) r.lo = x;
    if (x > r.hi) r.hi = x;
  }
  return r;
}

Interval sq_iv(const Interval& a) {
  Interval r = mul_iv(a, a);
  if (a.lo <= 0 && a.hi >= 0) r.lo = 0;
  return r;
}

Interval scale_iv(const mpq_class& c, const Interval& a) {
  if (c >= 0) return {c * a.lo, c * a.hi};
  return {c * a.hi, c * a.lo};
}

class PieceEnumerator {
 public:
  PieceEnumerator(const CertPiece& pc, const std::vector<ScaledQ>& sq, int64_t N, const Vec* t)
      : pc_(pc), sq_(sq), N_(N), t_(t), k_(pc.k()), d_(pc.gens.rows()) {
    has_lo_.assign(k_, 0);
    has_hi_.assign(k_, 0);
    lo_.assign(k_, 0);
    hi_.assign(k_, 0);
    for (int j = 0; j < k_; ++j)
      if (pc.nonneg[j]) has_lo_[j] = 1;
  }

  template <class Emit>
  void run(Emit&& emit) {
    if (t_) {
      // Rows with no parameters must already match.
      for (int r = 0; r < d_; ++r) {
        bool any = false;
        for (int j = 0; j < k_; ++j) any = any || pc_.gens.at(r, j) != 0;
        if (!any && (*t_)[r] != 0) return;
      }
    }
    if (!propagate()) return;
    for (int j = 0; j < k_; ++j) (has_lo_[j] && has_hi_[j] ? G_ : F_).push_back(j);
    if (!prepare_free()) return;
    z_.assign(k_, 0);
    rowsum_.assign(d_, 0);
    prepare_row_checks();
    dfs(0, emit);
  }

 private:
  bool tighten_lo(int j, int64_t v) {
    if (!has_lo_[j] || v > lo_[j]) {
      has_lo_[j] = 1;
      lo_[j] = v;
      return true;
    }
    return false;
  }
  bool tighten_hi(int j, int64_t v) {
    if (!has_hi_[j] || v < hi_[j]) {
      has_hi_[j] = 1;
      hi_[j] = v;
      return true;
    }
    return false;
  }
  bool empty(int j) const { return has_lo_[j] && has_hi_[j] && lo_[j] > hi_[j]; }

  bool propagate() {
    for (int iter = 0; iter < 200; ++iter) {
      bool changed = false;
      if (t_ && !rows_step(changed)) return false;
      if (!linear_step(changed)) return false;
      if (!changed) break;
    }
    return true;
  }

  bool rows_step(bool& changed) {
    for (int r = 0; r < d_; ++r) {
      for (int j = 0; j < k_; ++j) {
        int64_t a = pc_.gens.at(r, j);
        if (a == 0) continue;
        bool min_ok = true, max_ok = true;
        int64_t smin = 0, smax = 0;
        for (int i = 0; i < k_; ++i) {
          if (i == j) continue;
          int64_t m = pc_.gens.at(r, i);
          if (m == 0) continue;
          if (m > 0) {
            if (has_lo_[i]) smin += m * lo_[i]; else min_ok = false;
            if (has_hi_[i]) smax += m * hi_[i]; else max_ok = false;
          } else {
            if (has_hi_[i]) smin += m * hi_[i]; else min_ok = false;
            if (has_lo_[i]) smax += m * lo_[i]; else max_ok = false;
          }
        }
        int64_t tr = (*t_)[r];
        if (min_ok) {
          if (a > 0) changed |= tighten_hi(j, floor_div(tr - smin, a));
          else changed |= tighten_lo(j, ceil_div(tr - smin, a));
        }
        if (max_ok) {
          if (a > 0) changed |= tighten_lo(j, ceil_div(tr - smax, a));
          else changed |= tighten_hi(j, floor_div(tr - smax, a));
        }
        if (empty(j)) return false;
      }
    }
    return true;
  }

  // A bound with no quadratic part on the unbounded coordinates bounds the nonnegative
  // ones through their (positive) linear coefficients.
  bool linear_step(bool& changed) {
    for (const auto& q : pc_.bounds) {
      std::vector<int> U, B;
      for (int j = 0; j < k_; ++j) (has_lo_[j] && has_hi_[j] ? B : U).push_back(j);
      if (U.empty()) return true;
      bool flat = true;
      for (int i : U)
        for (int j : U) flat = flat && q.P[i][j] == 0;
      if (!flat) continue;
      std::vector<Interval> box(k_);
      for (int b : B) box[b] = {mpq_class(static_cast<long>(lo_[b])), mpq_class(static_cast<long>(hi_[b]))};
      Interval qb{q.c, q.c};
      for (int b : B) {
        Interval t = scale_iv(q.l[b], box[b]);
        qb.lo += t.lo;
        for (int b2 : B) {
          if (q.P[b][b2] == 0) continue;
          Interval p = b == b2 ? sq_iv(box[b]) : mul_iv(box[b], box[b2]);
          qb.lo += scale_iv(q.P[b][b2], p).lo;
        }
      }
      std::vector<Interval> lam(k_);
      bool ok = true;
      mpq_class total = qb.lo;
      std::vector<int> active;
      for (int j : U) {
        Interval L{q.l[j], q.l[j]};
        for (int b : B) {
          if (q.P[j][b] == 0) continue;
          Interval t = scale_iv(2 * q.P[j][b], box[b]);
          L.lo += t.lo;
          L.hi += t.hi;
        }
        lam[j] = L;
        if (L.lo == 0 && L.hi == 0) continue;
        if (!has_lo_[j] || lo_[j] < 0 || L.lo < 0) {
          ok = false;
          break;
        }
        total += L.lo * static_cast<long>(lo_[j]);
        active.push_back(j);
      }
      if (!ok) continue;
      for (int j : active) {
        if (lam[j].lo <= 0) continue;
        mpq_class rest = total - lam[j].lo * static_cast<long>(lo_[j]);
        mpq_class cap = floor_q((mpq_class(static_cast<long>(N_)) - rest) / lam[j].lo);
        changed |= tighten_hi(j, checked_int64(cap.get_num()));
        if (empty(j)) return false;
      }
    }
    return true;
  }

  // Sets up the lattice of free coordinates: z_F = z0 + K w, and the definite bound used
  // to enumerate w.
  bool prepare_free() {
    int f = static_cast<int>(F_.size());
    if (f == 0) return true;
    if (t_) {
      IntMatrix MF(d_, f);
      for (int r = 0; r < d_; ++r)
        for (int a = 0; a < f; ++a) MF.at(r, a) = pc_.gens.at(r, F_[a]);
      snf_ = smith_normal_form(MF);
      kd_ = f - snf_.rank;
      K_ = IntMatrix(f, kd_);
      for (int a = 0; a < f; ++a)
        for (int c = 0; c < kd_; ++c) K_.at(a, c) = snf_.V.at(a, snf_.rank + c);
    } else {
      kd_ = f;
      K_ = IntMatrix::identity(f);
    }
    if (kd_ == 0) return true;
    for (size_t qi = 0; qi < pc_.bounds.size(); ++qi) {
      const Quadratic& q = pc_.bounds[qi];
      RatMatrix Pw(kd_, std::vector<mpq_class>(kd_, 0));
      for (int x = 0; x < kd_; ++x)
        for (int y = 0; y < kd_; ++y) {
          mpq_class s = 0;
          for (int a = 0; a < f; ++a) {
            if (K_.at(a, x) == 0) continue;
            for (int b = 0; b < f; ++b)
              if (K_.at(b, y) != 0) s += static_cast<long>(K_.at(a, x)) * q.P[F_[a]][F_[b]] * static_cast<long>(K_.at(b, y));
          }
          Pw[x][y] = s;
        }
      if (!is_positive_definite(Pw)) continue;
      chosen_ = static_cast<int>(qi);
      Pinv_ = rat_inverse(Pw);
      return true;
    }
    fail(ErrorCode::NotMultipliable, "valuation bounds are not coercive along " + std::to_string(kd_) +
                                         " free direction(s); the coefficient sum is not certified finite");
  }

  void prepare_row_checks() {
    close_at_.assign(G_.size(), {});
    if (!t_) return;
    for (int r = 0; r < d_; ++r) {
      bool touches_free = false;
      for (int j : F_) touches_free = touches_free || pc_.gens.at(r, j) != 0;
      if (touches_free) continue;
      int last = -1;
      for (size_t p = 0; p < G_.size(); ++p)
        if (pc_.gens.at(r, G_[p]) != 0) last = static_cast<int>(p);
      if (last >= 0) close_at_[last].push_back(r);
    }
  }

  template <class Emit>
  void dfs(size_t p, Emit& emit) {
    if (p == G_.size()) {
      leaf(emit);
      return;
    }
    int j = G_[p];
    for (int64_t v = lo_[j]; v <= hi_[j]; ++v) {
      z_[j] = v;
      if (t_)
        for (int r = 0; r < d_; ++r) rowsum_[r] += pc_.gens.at(r, j) * v;
      bool ok = true;
      for (int r : close_at_[p]) ok = ok && rowsum_[r] == (*t_)[r];
      if (ok) dfs(p + 1, emit);
      if (t_)
        for (int r = 0; r < d_; ++r) rowsum_[r] -= pc_.gens.at(r, j) * v;
    }
    z_[j] = 0;
  }

  bool admissible(const Vec& z) const {
    for (int j : F_) {
      if (has_lo_[j] && z[j] < lo_[j]) return false;
      if (has_hi_[j] && z[j] > hi_[j]) return false;
    }
    for (const auto& s : sq_)
      if (!s.within(z, N_)) return false;
    return true;
  }

  template <class Emit>
  void leaf(Emit& emit) {
    int f = static_cast<int>(F_.size());
    Vec z = z_;
    if (f > 0 && t_) {
      Vec tp(d_);
      for (int r = 0; r < d_; ++r) tp[r] = (*t_)[r] - rowsum_[r];
      Vec c = snf_.U.apply(tp);
      Vec y(f, 0);
      for (int r = 0; r < d_; ++r) {
        if (r < snf_.rank) {
          if (c[r] % snf_.diagonal[r] != 0) return;
          y[r] = c[r] / snf_.diagonal[r];
        } else if (c[r] != 0) {
          return;
        }
      }
      Vec zf = snf_.V.apply(y);
      for (int a = 0; a < f; ++a) z[F_[a]] = zf[a];
    } else if (t_) {
      for (int r = 0; r < d_; ++r)
        if (rowsum_[r] != (*t_)[r]) return;
    }
    if (kd_ == 0) {
      if (admissible(z)) emit(z);
      return;
    }
    // Quadratic in w: w^T Pw w + lam.w + kappa with z = zfix + E w.
    const Quadratic& q = pc_.bounds[chosen_];
    std::vector<mpq_class> grad(k_);
    for (int i = 0; i < k_; ++i) {
      mpq_class s = q.l[i];
      for (int j = 0; j < k_; ++j)
        if (z[j] != 0) s += 2 * q.P[i][j] * static_cast<long>(z[j]);
      grad[i] = s;
    }
    std::vector<mpq_class> lam(kd_, 0);
    for (int x = 0; x < kd_; ++x)
      for (int a = 0; a < f; ++a)
        if (K_.at(a, x) != 0) lam[x] += grad[F_[a]] * static_cast<long>(K_.at(a, x));
    mpq_class kappa = q.eval(z);
    std::vector<mpq_class> center(kd_, 0);
    for (int x = 0; x < kd_; ++x) {
      for (int y = 0; y < kd_; ++y) center[x] -= Pinv_[x][y] * lam[y];
      center[x] /= 2;
    }
    mpq_class mval = kappa;
    for (int x = 0; x < kd_; ++x) mval += lam[x] * center[x] / 2;
    mpq_class room = mpq_class(static_cast<long>(N_)) - mval;
    if (room < 0) return;
    std::vector<int64_t> wlo(kd_), whi(kd_);
    for (int x = 0; x < kd_; ++x) {
      double hw = std::sqrt(room.get_d() * Pinv_[x][x].get_d()) + 1e-6;
      double cx = center[x].get_d();
      wlo[x] = static_cast<int64_t>(std::ceil(cx - hw - 1e-9));
      whi[x] = static_cast<int64_t>(std::floor(cx + hw + 1e-9));
      if (wlo[x] > whi[x]) return;
    }
    Vec w = wlo;
    for (;;) {
      Vec zz = z;
      for (int a = 0; a < f; ++a) {
        int64_t s = 0;
        for (int x = 0; x < kd_; ++x) s += K_.at(a, x) * w[x];
        zz[F_[a]] += s;
      }
      if (admissible(zz)) emit(zz);
      int x = kd_ - 1;
      for (; x >= 0; --x) {
        if (++w[x] <= whi[x]) break;
        w[x] = wlo[x];
      }
      if (x < 0) break;
    }
  }

  const CertPiece& pc_;
  const std::vector<ScaledQ>& sq_;
  int64_t N_;
  const Vec* t_;
  int k_, d_;
  std::vector<char> has_lo_, has_hi_;
  std::vector<int64_t> lo_, hi_;
  std::vector<int> G_, F_;
  SmithForm snf_;
  int kd_ = 0;
  IntMatrix K_;
  int chosen_ = -1;
  RatMatrix Pinv_;
  Vec z_, rowsum_;
  std::vector<std::vector<int>> close_at_;
};

std::vector<ScaledQ> scaled_bounds(const CertPiece& pc) {
  std::vector<ScaledQ> out;
  for (const auto& q : pc.bounds) out.push_back(scale(q));
  return out;
}

}  // namespace

Certificate::Certificate(int rank, std::vector<CertPiece> pieces) : rank_(rank), pieces_(std::move(pieces)) {
  for (const auto& p : pieces_) {
    if (static_cast<int>(p.base.size()) != rank || p.gens.rows() != rank)
      fail(ErrorCode::DimensionMismatch, "certificate piece does not live on the lattice");
    if (static_cast<int>(p.nonneg.size()) != p.k()) fail(ErrorCode::DimensionMismatch, "nonneg mask length");
    if (p.bounds.empty()) fail(ErrorCode::InvalidArgument, "certificate piece without a bound");
    for (const auto& q : p.bounds)
      if (q.k() != p.k()) fail(ErrorCode::DimensionMismatch, "bound arity");
  }
}

Certificate Certificate::finite(int rank, const std::vector<std::pair<Vec, int64_t>>& points) {
  std::vector<CertPiece> pieces;
  for (const auto& [h, v] : points)
    pieces.push_back(CertPiece{h, IntMatrix(rank, 0), {}, {Quadratic::constant(0, mpq_class(static_cast<long>(v)))}});
  return Certificate(rank, std::move(pieces));
}

Certificate Certificate::with_linear(const Vec& lambda, int64_t kappa) const {
  Certificate r = *this;
  for (auto& p : r.pieces_) {
    Vec gl = p.gens.transpose().apply(lambda);
    mpq_class dc = static_cast<long>(vec_dot(lambda, p.base) + kappa);
    for (auto& q : p.bounds) {
      for (int i = 0; i < p.k(); ++i) q.l[i] += static_cast<long>(gl[i]);
      q.c += dc;
    }
  }
  return r;
}

Certificate Certificate::translated(const Vec& offset) const {
  Certificate r = *this;
  for (auto& p : r.pieces_) p.base = vec_add(p.base, offset);
  return r;
}

Certificate Certificate::mapped(const IntMatrix& f) const {
  if (f.cols() != rank_) fail(ErrorCode::DimensionMismatch, "lattice map source rank");
  Certificate r;
  r.rank_ = f.rows();
  for (const auto& p : pieces_) r.pieces_.push_back(CertPiece{f.apply(p.base), f * p.gens, p.nonneg, p.bounds});
  return r;
}

Certificate Certificate::relaxed(int64_t slack) const {
  Certificate r = *this;
  for (auto& p : r.pieces_)
    for (auto& q : p.bounds) q.c -= static_cast<long>(slack);
  return r;
}

namespace {

Quadratic join(const Quadratic& a, const Quadratic& b, const IntMatrix& C, const Vec& la, const Vec& lb, int64_t c0) {
  int ka = a.k(), kb = b.k();
  Quadratic q = Quadratic::zero(ka + kb);
  for (int i = 0; i < ka; ++i)
    for (int j = 0; j < ka; ++j) q.P[i][j] = a.P[i][j];
  for (int i = 0; i < kb; ++i)
    for (int j = 0; j < kb; ++j) q.P[ka + i][ka + j] = b.P[i][j];
  for (int i = 0; i < ka; ++i)
    for (int j = 0; j < kb; ++j) {
      mpq_class h(static_cast<long>(C.at(i, j)), 2);
      h.canonicalize();
      q.P[i][ka + j] = h;
      q.P[ka + j][i] = h;
    }
  for (int i = 0; i < ka; ++i) q.l[i] = a.l[i] + static_cast<long>(la[i]);
  for (int j = 0; j < kb; ++j) q.l[ka + j] = b.l[j] + static_cast<long>(lb[j]);
  q.c = a.c + b.c + static_cast<long>(c0);
  return q;
}

}  // namespace

Certificate Certificate::product(const Certificate& a, const Certificate& b, const QuantParam& param) {
  if (a.rank_ != b.rank_ || a.rank_ != param.rank()) fail(ErrorCode::DimensionMismatch, "product of certificates");
  const IntMatrix& A = param.A();
  Certificate r;
  r.rank_ = a.rank_;
  for (const auto& pa : a.pieces_)
    for (const auto& pb : b.pieces_) {
      CertPiece p;
      p.base = vec_add(pa.base, pb.base);
      p.gens = pa.gens.hstack(pb.gens);
      p.nonneg = pa.nonneg;
      p.nonneg.insert(p.nonneg.end(), pb.nonneg.begin(), pb.nonneg.end());
      // (ba + Ma za)^T A (bb + Mb zb)
      IntMatrix C = pa.gens.transpose() * A * pb.gens;
      Vec la = pa.gens.transpose().apply(A.apply(pb.base));
      Vec lb = pb.gens.transpose().apply(A.transpose().apply(pa.base));
      int64_t c0 = bilinear_eval(A, pa.base, pb.base);
      for (const auto& qa : pa.bounds)
        for (const auto& qb : pb.bounds) p.bounds.push_back(join(qa, qb, C, la, lb, c0));
      r.pieces_.push_back(std::move(p));
    }
  return r;
}

Certificate Certificate::external(const Certificate& a, const Certificate& b) {
  Certificate r;
  r.rank_ = a.rank_ + b.rank_;
  for (const auto& pa : a.pieces_)
    for (const auto& pb : b.pieces_) {
      CertPiece p;
      p.base = vec_concat(pa.base, pb.base);
      p.gens = IntMatrix::block_diag(pa.gens, pb.gens);
      p.nonneg = pa.nonneg;
      p.nonneg.insert(p.nonneg.end(), pb.nonneg.begin(), pb.nonneg.end());
      IntMatrix C(pa.k(), pb.k());
      Vec la(pa.k(), 0), lb(pb.k(), 0);
      for (const auto& qa : pa.bounds)
        for (const auto& qb : pb.bounds) p.bounds.push_back(join(qa, qb, C, la, lb, 0));
      r.pieces_.push_back(std::move(p));
    }
  return r;
}

std::vector<Certificate::Point> Certificate::fiber(const Vec& h, int64_t N) const {
  if (static_cast<int>(h.size()) != rank_) fail(ErrorCode::DimensionMismatch, "fiber point length");
  std::vector<Point> out;
  for (size_t i = 0; i < pieces_.size(); ++i) {
    const CertPiece& pc = pieces_[i];
    if (pc.k() == 0) {
      if (pc.base == h && pc.bounds[0].c <= static_cast<long>(N)) {
        bool ok = true;
        for (const auto& q : pc.bounds) ok = ok && q.c <= static_cast<long>(N);
        if (ok) out.push_back(Point{static_cast<int>(i), {}});
      }
      continue;
    }
    std::vector<ScaledQ> sq = scaled_bounds(pc);
    Vec t = vec_sub(h, pc.base);
    PieceEnumerator en(pc, sq, N, &t);
    en.run([&](const Vec& z) { out.push_back(Point{static_cast<int>(i), z}); });
  }
  return out;
}

std::vector<Vec> Certificate::enumerate(int64_t N) const {
  std::set<Vec> pts;
  for (const auto& pc : pieces_) {
    if (pc.k() == 0) {
      bool ok = true;
      for (const auto& q : pc.bounds) ok = ok && q.c <= static_cast<long>(N);
      if (ok) pts.insert(pc.base);
      continue;
    }
    std::vector<ScaledQ> sq = scaled_bounds(pc);
    PieceEnumerator en(pc, sq, N, nullptr);
    en.run([&](const Vec& z) { pts.insert(pc.point(z)); });
  }
  return {pts.begin(), pts.end()};
}

int64_t Certificate::lower_bound(const Point& p) const {
  const CertPiece& pc = pieces_[p.piece];
  int64_t best = std::numeric_limits<int64_t>::min();
  for (const auto& q : pc.bounds) {
    mpq_class v = q.eval(p.z);
    mpz_class c;
    mpz_cdiv_q(c.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
    best = std::max(best, checked_int64(c));
  }
  return best;
}

}  // namespace qtheta
