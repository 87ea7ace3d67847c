#include "qtheta/lattice.hpp"

#include <algorithm>
#include <sstream>

#include "qtheta/error.hpp"

namespace qtheta {

namespace {

using ZMat = std::vector<std::vector<mpz_class>>;

ZMat to_z(const IntMatrix& M) {
  ZMat z(M.rows(), std::vector<mpz_class>(M.cols()));
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j) z[i][j] = static_cast<long>(M.at(i, j));
  return z;
}

IntMatrix from_z(const ZMat& z, int rows, int cols) {
  IntMatrix M(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) M.at(i, j) = checked_int64(z[i][j]);
  return M;
}

ZMat z_identity(int n) {
  ZMat z(n, std::vector<mpz_class>(n, 0));
  for (int i = 0; i < n; ++i) z[i][i] = 1;
  return z;
}

void check_dims(const Vec& a, const Vec& b) {
  if (a.size() != b.size())
    fail(ErrorCode::DimensionMismatch, "vectors of length " + std::to_string(a.size()) + " and " +
                                           std::to_string(b.size()));
}

}  // namespace

int64_t checked_int64(const mpz_class& z) {
  if (!z.fits_slong_p()) fail(ErrorCode::InvalidArgument, "integer overflow in lattice computation");
  return z.get_si();
}

int64_t floor_div(int64_t a, int64_t b) {
  int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

int64_t ceil_div(int64_t a, int64_t b) { return -floor_div(-a, b); }

Vec vec_add(const Vec& a, const Vec& b) {
  check_dims(a, b);
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Vec vec_sub(const Vec& a, const Vec& b) {
  check_dims(a, b);
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vec vec_scale(const Vec& a, int64_t k) {
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] * k;
  return r;
}

Vec vec_neg(const Vec& a) { return vec_scale(a, -1); }

int64_t vec_dot(const Vec& a, const Vec& b) {
  check_dims(a, b);
  int64_t s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

bool vec_is_zero(const Vec& a) {
  return std::all_of(a.begin(), a.end(), [](int64_t x) { return x == 0; });
}

int64_t vec_norm_inf(const Vec& a) {
  int64_t m = 0;
  for (auto x : a) m = std::max(m, x < 0 ? -x : x);
  return m;
}

Vec vec_concat(const Vec& a, const Vec& b) {
  Vec r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

std::string vec_string(const Vec& a) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < a.size(); ++i) os << (i ? "," : "") << a[i];
  os << ")";
  return os.str();
}

size_t VecHash::operator()(const Vec& v) const noexcept {
  size_t h = 1469598103934665603ull;
  for (auto x : v) {
    h ^= static_cast<size_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

IntMatrix::IntMatrix(int rows, int cols, int64_t fill)
    : rows_(rows), cols_(cols), d_(static_cast<size_t>(rows) * cols, fill) {}

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<int64_t>> rows) {
  rows_ = static_cast<int>(rows.size());
  cols_ = rows_ ? static_cast<int>(rows.begin()->size()) : 0;
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != cols_) fail(ErrorCode::DimensionMismatch, "ragged matrix literal");
    d_.insert(d_.end(), r.begin(), r.end());
  }
}

IntMatrix IntMatrix::identity(int n) {
  IntMatrix m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::from_columns(int rows, const std::vector<Vec>& cols) {
  IntMatrix m(rows, static_cast<int>(cols.size()));
  for (size_t j = 0; j < cols.size(); ++j) {
    if (static_cast<int>(cols[j].size()) != rows) fail(ErrorCode::DimensionMismatch, "column length");
    for (int i = 0; i < rows; ++i) m.at(i, static_cast<int>(j)) = cols[j][i];
  }
  return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<Vec>& rows, int cols) {
  IntMatrix m(static_cast<int>(rows.size()), cols);
  for (size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<int>(rows[i].size()) != cols) fail(ErrorCode::DimensionMismatch, "row length");
    for (int j = 0; j < cols; ++j) m.at(static_cast<int>(i), j) = rows[i][j];
  }
  return m;
}

Vec IntMatrix::col(int j) const {
  Vec v(rows_);
  for (int i = 0; i < rows_; ++i) v[i] = at(i, j);
  return v;
}

Vec IntMatrix::row(int i) const {
  Vec v(cols_);
  for (int j = 0; j < cols_; ++j) v[j] = at(i, j);
  return v;
}

IntMatrix IntMatrix::transpose() const {
  IntMatrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
  return t;
}

IntMatrix IntMatrix::operator*(const IntMatrix& o) const {
  if (cols_ != o.rows_) fail(ErrorCode::DimensionMismatch, "matrix product shapes");
  IntMatrix r(rows_, o.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      int64_t a = at(i, k);
      if (a == 0) continue;
      for (int j = 0; j < o.cols_; ++j) r.at(i, j) += a * o.at(k, j);
    }
  return r;
}

IntMatrix IntMatrix::operator+(const IntMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) fail(ErrorCode::DimensionMismatch, "matrix sum shapes");
  IntMatrix r = *this;
  for (size_t i = 0; i < d_.size(); ++i) r.d_[i] += o.d_[i];
  return r;
}

IntMatrix IntMatrix::scaled(int64_t k) const {
  IntMatrix r = *this;
  for (auto& x : r.d_) x *= k;
  return r;
}

Vec IntMatrix::apply(const Vec& v) const {
  if (static_cast<int>(v.size()) != cols_)
    fail(ErrorCode::DimensionMismatch, "matrix with " + std::to_string(cols_) + " columns applied to vector of length " +
                                           std::to_string(v.size()));
  Vec r(rows_, 0);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r[i] += at(i, j) * v[j];
  return r;
}

IntMatrix IntMatrix::hstack(const IntMatrix& o) const {
  if (rows_ != o.rows_) fail(ErrorCode::DimensionMismatch, "hstack row counts");
  IntMatrix r(rows_, cols_ + o.cols_);
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) r.at(i, j) = at(i, j);
    for (int j = 0; j < o.cols_; ++j) r.at(i, cols_ + j) = o.at(i, j);
  }
  return r;
}

IntMatrix IntMatrix::block_diag(const IntMatrix& a, const IntMatrix& b) {
  IntMatrix r(a.rows_ + b.rows_, a.cols_ + b.cols_);
  for (int i = 0; i < a.rows_; ++i)
    for (int j = 0; j < a.cols_; ++j) r.at(i, j) = a.at(i, j);
  for (int i = 0; i < b.rows_; ++i)
    for (int j = 0; j < b.cols_; ++j) r.at(a.rows_ + i, a.cols_ + j) = b.at(i, j);
  return r;
}

bool IntMatrix::is_zero() const {
  return std::all_of(d_.begin(), d_.end(), [](int64_t x) { return x == 0; });
}

std::string IntMatrix::to_string() const {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < rows_; ++i) {
    os << (i ? ",[" : "[");
    for (int j = 0; j < cols_; ++j) os << (j ? "," : "") << at(i, j);
    os << "]";
  }
  os << "]";
  return os.str();
}

SmithForm smith_normal_form(const IntMatrix& M) {
  const int m = M.rows(), n = M.cols();
  ZMat A = to_z(M), U = z_identity(m), V = z_identity(n);
  auto swap_rows = [&](int a, int b) {
    std::swap(A[a], A[b]);
    std::swap(U[a], U[b]);
  };
  auto swap_cols = [&](int a, int b) {
    for (auto& r : A) std::swap(r[a], r[b]);
    for (auto& r : V) std::swap(r[a], r[b]);
  };
  auto row_axpy = [&](int dst, int src, const mpz_class& q) {  // row_dst -= q row_src
    for (int j = 0; j < n; ++j) A[dst][j] -= q * A[src][j];
    for (int j = 0; j < m; ++j) U[dst][j] -= q * U[src][j];
  };
  auto col_axpy = [&](int dst, int src, const mpz_class& q) {  // col_dst -= q col_src
    for (int i = 0; i < m; ++i) A[i][dst] -= q * A[i][src];
    for (int i = 0; i < n; ++i) V[i][dst] -= q * V[i][src];
  };

  int t = 0;
  for (; t < std::min(m, n); ++t) {
    // Smallest nonzero entry of the trailing block becomes the pivot.
    int pi = -1, pj = -1;
    for (int i = t; i < m; ++i)
      for (int j = t; j < n; ++j)
        if (A[i][j] != 0 && (pi < 0 || abs(A[i][j]) < abs(A[pi][pj]))) pi = i, pj = j;
    if (pi < 0) break;
    swap_rows(t, pi);
    swap_cols(t, pj);
    for (;;) {
      bool dirty = false;
      for (int i = t + 1; i < m; ++i) {
        if (A[i][t] == 0) continue;
        mpz_class q = A[i][t] / A[t][t];
        row_axpy(i, t, q);
        if (A[i][t] != 0) dirty = true;
      }
      for (int j = t + 1; j < n; ++j) {
        if (A[t][j] == 0) continue;
        mpz_class q = A[t][j] / A[t][t];
        col_axpy(j, t, q);
        if (A[t][j] != 0) dirty = true;
      }
      if (dirty) {
        // Move the smallest leftover into the pivot and repeat.
        int bi = t, bj = t;
        for (int i = t + 1; i < m; ++i)
          if (A[i][t] != 0 && abs(A[i][t]) < abs(A[bi][bj])) bi = i, bj = t;
        for (int j = t + 1; j < n; ++j)
          if (A[t][j] != 0 && abs(A[t][j]) < abs(A[bi][bj])) bi = t, bj = j;
        if (bi != t) swap_rows(t, bi);
        if (bj != t) swap_cols(t, bj);
        continue;
      }
      // Divisibility of the trailing block by the pivot.
      int bad = -1;
      for (int i = t + 1; i < m && bad < 0; ++i)
        for (int j = t + 1; j < n; ++j)
          if (A[i][j] % A[t][t] != 0) {
            bad = i;
            break;
          }
      if (bad < 0) break;
      row_axpy(t, bad, -1);
    }
    if (A[t][t] < 0) {
      for (int j = 0; j < n; ++j) A[t][j] = -A[t][j];
      for (int j = 0; j < m; ++j) U[t][j] = -U[t][j];
    }
  }
  SmithForm sf;
  sf.U = from_z(U, m, m);
  sf.V = from_z(V, n, n);
  sf.D = from_z(A, m, n);
  sf.rank = 0;
  for (int i = 0; i < std::min(m, n); ++i) {
    if (sf.D.at(i, i) == 0) break;
    sf.diagonal.push_back(sf.D.at(i, i));
    ++sf.rank;
  }
  return sf;
}

int64_t determinant(const IntMatrix& M) {
  if (M.rows() != M.cols()) fail(ErrorCode::DimensionMismatch, "determinant of non-square matrix");
  int n = M.rows();
  if (n == 0) return 1;
  // Bareiss fraction-free elimination.
  ZMat A = to_z(M);
  mpz_class prev = 1;
  int sign = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (A[k][k] == 0) {
      int s = -1;
      for (int i = k + 1; i < n; ++i)
        if (A[i][k] != 0) {
          s = i;
          break;
        }
      if (s < 0) return 0;
      std::swap(A[k], A[s]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) / prev;
    prev = A[k][k];
  }
  return sign * checked_int64(A[n - 1][n - 1]);
}

int matrix_rank(const IntMatrix& M) { return smith_normal_form(M).rank; }

std::optional<Vec> solve_integer(const IntMatrix& M, const Vec& b) {
  if (static_cast<int>(b.size()) != M.rows()) fail(ErrorCode::DimensionMismatch, "right-hand side length");
  SmithForm sf = smith_normal_form(M);
  Vec c = sf.U.apply(b);
  Vec y(M.cols(), 0);
  for (int i = 0; i < M.rows(); ++i) {
    if (i < sf.rank) {
      if (c[i] % sf.diagonal[i] != 0) return std::nullopt;
      y[i] = c[i] / sf.diagonal[i];
    } else if (c[i] != 0) {
      return std::nullopt;
    }
  }
  return sf.V.apply(y);
}

IntMatrix kernel_basis(const IntMatrix& M) {
  SmithForm sf = smith_normal_form(M);
  int k = M.cols() - sf.rank;
  IntMatrix K(M.cols(), k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < M.cols(); ++i) K.at(i, j) = sf.V.at(i, sf.rank + j);
  return K;
}

QuotientData::QuotientData(int rank, const IntMatrix& image) : rank_(rank) {
  if (image.rows() != rank) fail(ErrorCode::DimensionMismatch, "image map does not target the lattice");
  SmithForm sf = smith_normal_form(image);
  for (auto d : sf.diagonal)
    if (d > 1) factors_.push_back(d);
  finite_ = sf.rank == rank;
  if (!finite_) return;
  // Column-style lower triangular Hermite basis, row by row with column gcd steps.
  std::vector<std::vector<mpz_class>> cols;
  for (int j = 0; j < image.cols(); ++j) {
    std::vector<mpz_class> c(rank);
    for (int i = 0; i < rank; ++i) c[i] = static_cast<long>(image.at(i, j));
    cols.push_back(c);
  }
  hnf_ = IntMatrix(rank, rank);
  for (int i = 0; i < rank; ++i) {
    for (;;) {
      int best = -1, nz = 0;
      for (size_t j = 0; j < cols.size(); ++j)
        if (cols[j][i] != 0) {
          ++nz;
          if (best < 0 || abs(cols[j][i]) < abs(cols[best][i])) best = static_cast<int>(j);
        }
      if (best < 0) fail(ErrorCode::InvalidArgument, "image is not of full rank");
      if (nz == 1) break;
      for (size_t j = 0; j < cols.size(); ++j) {
        if (static_cast<int>(j) == best || cols[j][i] == 0) continue;
        mpz_class q = cols[j][i] / cols[best][i];
        for (int r = 0; r < rank; ++r) cols[j][r] -= q * cols[best][r];
      }
    }
    int piv = -1;
    for (size_t j = 0; j < cols.size(); ++j)
      if (cols[j][i] != 0) piv = static_cast<int>(j);
    std::vector<mpz_class> c = cols[piv];
    cols.erase(cols.begin() + piv);
    if (c[i] < 0)
      for (auto& x : c) x = -x;
    for (int r = 0; r < rank; ++r) hnf_.at(r, i) = checked_int64(c[r]);
  }
  // Enumerate the fundamental box in lexicographic order.
  Vec cur(rank, 0);
  int64_t total = 1;
  for (int i = 0; i < rank; ++i) total *= hnf_.at(i, i);
  reps_.reserve(static_cast<size_t>(total));
  for (int64_t n = 0; n < total; ++n) {
    reps_.push_back(cur);
    for (int i = rank - 1; i >= 0; --i) {
      if (++cur[i] < hnf_.at(i, i)) break;
      cur[i] = 0;
    }
  }
}

std::optional<int64_t> QuotientData::index() const {
  if (!finite_) return std::nullopt;
  int64_t p = 1;
  for (auto f : factors_) p *= f;
  return p;
}

Vec QuotientData::reduce(const Vec& h) const {
  if (!finite_) fail(ErrorCode::InfiniteIndex, "reduction modulo an image of infinite index");
  if (static_cast<int>(h.size()) != rank_) fail(ErrorCode::DimensionMismatch, "vector length");
  Vec r = h;
  for (int i = 0; i < rank_; ++i) {
    int64_t q = floor_div(r[i], hnf_.at(i, i));
    if (q == 0) continue;
    for (int k = i; k < rank_; ++k) r[k] -= q * hnf_.at(k, i);
  }
  return r;
}

int QuotientData::projection(const Vec& h) const {
  Vec r = reduce(h);
  int64_t idx = 0;
  for (int i = 0; i < rank_; ++i) idx = idx * hnf_.at(i, i) + r[i];
  return static_cast<int>(idx);
}

bool is_symmetric(const RatMatrix& Q) {
  for (size_t i = 0; i < Q.size(); ++i) {
    if (Q[i].size() != Q.size()) return false;
    for (size_t j = 0; j < i; ++j)
      if (Q[i][j] != Q[j][i]) return false;
  }
  return true;
}

bool is_positive_definite(const RatMatrix& Q) {
  if (!is_symmetric(Q)) fail(ErrorCode::NotSymmetric, "quadratic form matrix is not symmetric");
  RatMatrix A = Q;
  size_t n = A.size();
  for (size_t k = 0; k < n; ++k) {
    if (A[k][k] <= 0) return false;
    for (size_t i = k + 1; i < n; ++i) {
      mpq_class f = A[i][k] / A[k][k];
      for (size_t j = k; j < n; ++j) A[i][j] -= f * A[k][j];
    }
  }
  return true;
}

RatMatrix to_rational(const IntMatrix& M) {
  RatMatrix R(M.rows(), std::vector<mpq_class>(M.cols()));
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j) R[i][j] = static_cast<long>(M.at(i, j));
  return R;
}

RatMatrix rat_inverse(const RatMatrix& M) {
  size_t n = M.size();
  RatMatrix A = M, I(n, std::vector<mpq_class>(n, 0));
  for (size_t i = 0; i < n; ++i) I[i][i] = 1;
  for (size_t k = 0; k < n; ++k) {
    size_t p = k;
    while (p < n && A[p][k] == 0) ++p;
    if (p == n) fail(ErrorCode::NotInvertible, "singular rational matrix");
    std::swap(A[p], A[k]);
    std::swap(I[p], I[k]);
    mpq_class inv = 1 / A[k][k];
    for (size_t j = 0; j < n; ++j) {
      A[k][j] *= inv;
      I[k][j] *= inv;
    }
    for (size_t i = 0; i < n; ++i) {
      if (i == k || A[i][k] == 0) continue;
      mpq_class f = A[i][k];
      for (size_t j = 0; j < n; ++j) {
        A[i][j] -= f * A[k][j];
        I[i][j] -= f * I[k][j];
      }
    }
  }
  return I;
}

int64_t bilinear_eval(const IntMatrix& Q, const Vec& g, const Vec& h) {
  if (static_cast<int>(g.size()) != Q.rows() || static_cast<int>(h.size()) != Q.cols())
    fail(ErrorCode::DimensionMismatch, "bilinear form of shape " + std::to_string(Q.rows()) + "x" +
                                           std::to_string(Q.cols()) + " on vectors of length " +
                                           std::to_string(g.size()) + ", " + std::to_string(h.size()));
  int64_t s = 0;
  for (int i = 0; i < Q.rows(); ++i) {
    if (g[i] == 0) continue;
    int64_t r = 0;
    for (int j = 0; j < Q.cols(); ++j) r += Q.at(i, j) * h[j];
    s += g[i] * r;
  }
  return s;
}

}  // namespace qtheta
