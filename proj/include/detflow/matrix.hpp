#pragma once

#include <span>
#include <string>
#include <vector>

namespace detflow {

// Dense real n-by-n matrix, row-major, value semantics. Every operation below
// takes its inputs by const reference and returns a fresh value; nothing here
// mutates its arguments, so concurrent use is safe.
class Matrix {
 public:
  // Zero matrix of the given dimension.
  explicit Matrix(int n);
  // Takes ownership of a row-major element array of length n*n. Throws
  // std::invalid_argument on a size mismatch or any non-finite element.
  Matrix(int n, std::vector<double> elems);

  static Matrix identity(int n);
  static Matrix zero(int n) { return Matrix(n); }

  int dim() const { return n_; }

  double operator()(int i, int j) const {
    return elems_[static_cast<std::size_t>(i) * n_ + j];
  }
  double& operator()(int i, int j) {
    return elems_[static_cast<std::size_t>(i) * n_ + j];
  }

  std::span<const double> elems() const { return elems_; }

  bool operator==(const Matrix&) const = default;

 private:
  int n_;
  std::vector<double> elems_;
};

// Sum of the diagonal, accumulated left to right.
double trace(const Matrix& m);

// Determinant via LU with partial pivoting. Returns exactly 0.0 when a pivot
// column is entirely below 1e-300 in magnitude, so rank-deficient inputs do
// not leak subnormal noise into downstream quadrature.
double det(const Matrix& m);

// True iff every LU pivot magnitude exceeds eps_inv * max(1, max-abs of m).
bool is_invertible(const Matrix& m, double eps_inv = 1e-12);

// Throws SingularMatrix when is_invertible fails under the default threshold.
Matrix inverse(const Matrix& m);

// Adjugate (transpose of the cofactor matrix); defined for every input,
// including singular ones. For n = 1 the adjugate is [[1]] by convention.
// Well-conditioned inputs go through det * inverse; otherwise each entry is
// a signed (n-1)x(n-1) LU determinant.
Matrix adjugate(const Matrix& m);

enum class ReplaceAxis { Rows, Columns };

// Sum over j of det(x with its j-th row/column replaced by the j-th
// row/column of f). Equals trace(adjugate(x) * f) along either axis.
double replaced_det_sum(const Matrix& x, const Matrix& f, ReplaceAxis axis);

Matrix mat_add(const Matrix& a, const Matrix& b);
Matrix mat_sub(const Matrix& a, const Matrix& b);
Matrix mat_mul(const Matrix& a, const Matrix& b);
Matrix mat_scale(double lambda, const Matrix& m);

// trace(p * q) without forming the product.
double trace_of_product(const Matrix& p, const Matrix& q);

// Max absolute element; the norm used by every tolerance in this project.
double max_abs(const Matrix& m);

// Row-major dump, for failure replay output.
std::string to_string(const Matrix& m);

}  // namespace detflow
