#include "detflow/matrix.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>

#include "detflow/errors.hpp"

namespace detflow {

namespace {

// A pivot column whose entries all sit below this magnitude is treated as
// exactly zero: det short-circuits to 0.0.
constexpr double kExactZeroPivot = 1e-300;

struct LuFactors {
  // Combined L (strict lower, unit diagonal implied) and U (upper) storage.
  std::vector<double> lu;
  std::vector<int> perm;       // row permutation applied to the input
  double parity = 1.0;         // sign of the permutation
  std::vector<double> pivots;  // U diagonal, in elimination order
  bool dead_column = false;    // some pivot column was entirely < 1e-300
};

LuFactors lu_factor(const Matrix& m) {
  const int n = m.dim();
  LuFactors f;
  f.lu.assign(m.elems().begin(), m.elems().end());
  f.perm.resize(n);
  for (int i = 0; i < n; ++i) f.perm[i] = i;

  auto at = [&](int i, int j) -> double& {
    return f.lu[static_cast<std::size_t>(i) * n + j];
  };

  for (int k = 0; k < n; ++k) {
    int p = k;
    double best = std::fabs(at(k, k));
    for (int i = k + 1; i < n; ++i) {
      const double v = std::fabs(at(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (best < kExactZeroPivot) {
      f.dead_column = true;
      return f;
    }
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(at(p, j), at(k, j));
      std::swap(f.perm[p], f.perm[k]);
      f.parity = -f.parity;
    }
    const double pivot = at(k, k);
    f.pivots.push_back(pivot);
    for (int i = k + 1; i < n; ++i) {
      const double l = at(i, k) / pivot;
      at(i, k) = l;
      for (int j = k + 1; j < n; ++j) at(i, j) -= l * at(k, j);
    }
  }
  return f;
}

bool pivots_pass(const LuFactors& f, const Matrix& m, double eps_inv) {
  if (f.dead_column) return false;
  const double scale = std::max(1.0, max_abs(m));
  for (double p : f.pivots) {
    if (!(std::fabs(p) > eps_inv * scale)) return false;
  }
  return true;
}

// Solve m * x = e_col given the factorization of m.
void lu_solve_unit(const LuFactors& f, int n, int col, std::vector<double>& x) {
  x.assign(n, 0.0);
  // permuted right-hand side, then forward substitution with unit L
  for (int i = 0; i < n; ++i) x[i] = (f.perm[i] == col) ? 1.0 : 0.0;
  for (int i = 1; i < n; ++i) {
    double s = x[i];
    for (int j = 0; j < i; ++j) s -= f.lu[static_cast<std::size_t>(i) * n + j] * x[j];
    x[i] = s;
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = x[i];
    for (int j = i + 1; j < n; ++j) s -= f.lu[static_cast<std::size_t>(i) * n + j] * x[j];
    x[i] = s / f.lu[static_cast<std::size_t>(i) * n + i];
  }
}

Matrix minor_of(const Matrix& m, int drop_row, int drop_col) {
  const int n = m.dim();
  Matrix out(n - 1);
  int r = 0;
  for (int i = 0; i < n; ++i) {
    if (i == drop_row) continue;
    int c = 0;
    for (int j = 0; j < n; ++j) {
      if (j == drop_col) continue;
      out(r, c) = m(i, j);
      ++c;
    }
    ++r;
  }
  return out;
}

void check_same_dim(const Matrix& a, const Matrix& b, const char* op) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatch(std::string(op) + ": " + std::to_string(a.dim()) +
                            "x" + std::to_string(a.dim()) + " vs " +
                            std::to_string(b.dim()) + "x" + std::to_string(b.dim()));
  }
}

}  // namespace

Matrix::Matrix(int n) : n_(n), elems_(static_cast<std::size_t>(n) * n, 0.0) {
  if (n < 1) throw std::invalid_argument("matrix dimension must be >= 1");
}

Matrix::Matrix(int n, std::vector<double> elems) : n_(n), elems_(std::move(elems)) {
  if (n < 1) throw std::invalid_argument("matrix dimension must be >= 1");
  if (elems_.size() != static_cast<std::size_t>(n) * n) {
    throw std::invalid_argument("matrix element count does not match dimension");
  }
  for (double v : elems_) {
    if (!std::isfinite(v)) throw std::invalid_argument("matrix element is not finite");
  }
}

Matrix Matrix::identity(int n) {
  Matrix m(n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double trace(const Matrix& m) {
  double s = 0.0;
  for (int i = 0; i < m.dim(); ++i) s += m(i, i);
  return s;
}

double det(const Matrix& m) {
  const LuFactors f = lu_factor(m);
  if (f.dead_column) return 0.0;
  double d = f.parity;
  for (double p : f.pivots) d *= p;
  return d;
}

bool is_invertible(const Matrix& m, double eps_inv) {
  return pivots_pass(lu_factor(m), m, eps_inv);
}

Matrix inverse(const Matrix& m) {
  const LuFactors f = lu_factor(m);
  if (!pivots_pass(f, m, 1e-12)) {
    throw SingularMatrix("inverse: matrix is singular to working precision");
  }
  const int n = m.dim();
  Matrix out(n);
  std::vector<double> col;
  for (int j = 0; j < n; ++j) {
    lu_solve_unit(f, n, j, col);
    for (int i = 0; i < n; ++i) out(i, j) = col[i];
  }
  return out;
}

Matrix adjugate(const Matrix& m) {
  const int n = m.dim();
  if (n == 1) {
    Matrix out(1);
    out(0, 0) = 1.0;
    return out;
  }
  if (is_invertible(m)) {
    return mat_scale(det(m), inverse(m));
  }
  // Cofactor fallback; holds for singular inputs where det * inverse does not.
  Matrix out(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double c = det(minor_of(m, i, j));
      out(j, i) = (((i + j) % 2) == 0) ? c : -c;
    }
  }
  return out;
}

double replaced_det_sum(const Matrix& x, const Matrix& f, ReplaceAxis axis) {
  check_same_dim(x, f, "replaced_det_sum");
  const int n = x.dim();
  double sum = 0.0;
  for (int j = 0; j < n; ++j) {
    Matrix y = x;
    if (axis == ReplaceAxis::Rows) {
      for (int c = 0; c < n; ++c) y(j, c) = f(j, c);
    } else {
      for (int r = 0; r < n; ++r) y(r, j) = f(r, j);
    }
    sum += det(y);
  }
  return sum;
}

Matrix mat_add(const Matrix& a, const Matrix& b) {
  check_same_dim(a, b, "mat_add");
  const int n = a.dim();
  Matrix out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = a(i, j) + b(i, j);
  return out;
}

Matrix mat_sub(const Matrix& a, const Matrix& b) {
  check_same_dim(a, b, "mat_sub");
  const int n = a.dim();
  Matrix out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = a(i, j) - b(i, j);
  return out;
}

Matrix mat_mul(const Matrix& a, const Matrix& b) {
  check_same_dim(a, b, "mat_mul");
  const int n = a.dim();
  Matrix out(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += a(i, k) * b(k, j);
      out(i, j) = s;
    }
  }
  return out;
}

Matrix mat_scale(double lambda, const Matrix& m) {
  const int n = m.dim();
  Matrix out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = lambda * m(i, j);
  return out;
}

double trace_of_product(const Matrix& p, const Matrix& q) {
  check_same_dim(p, q, "trace_of_product");
  const int n = p.dim();
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) s += p(i, k) * q(k, i);
  return s;
}

double max_abs(const Matrix& m) {
  double best = 0.0;
  for (double v : m.elems()) best = std::max(best, std::fabs(v));
  return best;
}

std::string to_string(const Matrix& m) {
  std::string out = "[";
  for (int i = 0; i < m.dim(); ++i) {
    out += (i == 0) ? "[" : " [";
    for (int j = 0; j < m.dim(); ++j) {
      out += std::to_string(m(i, j));
      if (j + 1 < m.dim()) out += ", ";
    }
    out += "]";
  }
  out += "]";
  return out;
}

}  // namespace detflow
