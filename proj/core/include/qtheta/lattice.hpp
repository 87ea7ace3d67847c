#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qtheta {

using Vec = std::vector<int64_t>;

Vec vec_add(const Vec& a, const Vec& b);
Vec vec_sub(const Vec& a, const Vec& b);
Vec vec_scale(const Vec& a, int64_t k);
Vec vec_neg(const Vec& a);
int64_t vec_dot(const Vec& a, const Vec& b);
bool vec_is_zero(const Vec& a);
int64_t vec_norm_inf(const Vec& a);
Vec vec_concat(const Vec& a, const Vec& b);
std::string vec_string(const Vec& a);

struct VecHash {
  size_t operator()(const Vec& v) const noexcept;
};

// Dense row-major integer matrix; a LatticeMap Z^cols -> Z^rows.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(int rows, int cols, int64_t fill = 0);
  IntMatrix(std::initializer_list<std::initializer_list<int64_t>> rows);
  static IntMatrix identity(int n);
  static IntMatrix from_columns(int rows, const std::vector<Vec>& cols);
  static IntMatrix from_rows(const std::vector<Vec>& rows, int cols);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int64_t& at(int i, int j) { return d_[static_cast<size_t>(i) * cols_ + j]; }
  int64_t at(int i, int j) const { return d_[static_cast<size_t>(i) * cols_ + j]; }
  Vec col(int j) const;
  Vec row(int i) const;

  IntMatrix transpose() const;
  IntMatrix operator*(const IntMatrix& o) const;
  IntMatrix operator+(const IntMatrix& o) const;
  IntMatrix scaled(int64_t k) const;
  Vec apply(const Vec& v) const;
  IntMatrix hstack(const IntMatrix& o) const;
  static IntMatrix block_diag(const IntMatrix& a, const IntMatrix& b);
  bool is_zero() const;

  friend bool operator==(const IntMatrix& a, const IntMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.d_ == b.d_;
  }
  friend bool operator!=(const IntMatrix& a, const IntMatrix& b) { return !(a == b); }
  std::string to_string() const;

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<int64_t> d_;
};

// U * M * V = D with U, V unimodular and d_1 | d_2 | ... on the diagonal.
struct SmithForm {
  IntMatrix U, D, V;
  int rank = 0;
  std::vector<int64_t> diagonal;  // the nonzero invariant factors, length rank
};

SmithForm smith_normal_form(const IntMatrix& M);
int64_t determinant(const IntMatrix& M);
int matrix_rank(const IntMatrix& M);

// A particular integer solution of M x = b, if any.
std::optional<Vec> solve_integer(const IntMatrix& M, const Vec& b);
// Columns form a basis of {x : M x = 0}.
IntMatrix kernel_basis(const IntMatrix& M);

// H / image(M) for H = Z^rank.  Coset representatives are canonical: the unique vector
// reduced against the Hermite basis of the image (0 <= r_i < diagonal_i), sorted.
class QuotientData {
 public:
  QuotientData(int rank, const IntMatrix& image);

  int rank() const { return rank_; }
  const std::vector<int64_t>& invariant_factors() const { return factors_; }
  bool finite() const { return finite_; }
  std::optional<int64_t> index() const;
  const std::vector<Vec>& coset_reps() const { return reps_; }
  // Canonical reduced representative of h's coset (finite index only).
  Vec reduce(const Vec& h) const;
  int projection(const Vec& h) const;
  // Lower-triangular Hermite basis of the image, columns.
  const IntMatrix& hermite() const { return hnf_; }

 private:
  int rank_;
  std::vector<int64_t> factors_;
  bool finite_ = false;
  IntMatrix hnf_;
  std::vector<Vec> reps_;
};

using RatMatrix = std::vector<std::vector<mpq_class>>;

bool is_positive_definite(const RatMatrix& Q);
bool is_symmetric(const RatMatrix& Q);
RatMatrix to_rational(const IntMatrix& M);
// Inverse of a nonsingular rational matrix.
RatMatrix rat_inverse(const RatMatrix& M);
int64_t bilinear_eval(const IntMatrix& Q, const Vec& g, const Vec& h);

int64_t floor_div(int64_t a, int64_t b);
int64_t ceil_div(int64_t a, int64_t b);
int64_t checked_int64(const mpz_class& z);

}  // namespace qtheta
