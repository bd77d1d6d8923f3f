#include <cmath>
#include <stdexcept>

#include "doctest.h"

#include "detflow/check.hpp"
#include "detflow/errors.hpp"
#include "detflow/matrix.hpp"
#include "detflow/random.hpp"
#include "oracles.hpp"

using namespace detflow;

TEST_CASE("cofactor oracle agrees with hand-computed determinants") {
  CHECK(oracle::cofactor_det(Matrix(1, {7.0})) == 7.0);
  CHECK(oracle::cofactor_det(Matrix(2, {1, 2, 3, 4})) == -2.0);
  // 1*(5*10-6*8) - 2*(4*10-6*7) + 3*(4*8-5*7) = 2 + 4 - 9
  CHECK(oracle::cofactor_det(Matrix(3, {1, 2, 3, 4, 5, 6, 7, 8, 10})) == doctest::Approx(-3.0));
  const Matrix adj = oracle::cofactor_adjugate(Matrix(2, {1, 2, 3, 4}));
  CHECK(adj(0, 0) == 4.0);
  CHECK(adj(0, 1) == -2.0);
  CHECK(adj(1, 0) == -3.0);
  CHECK(adj(1, 1) == 1.0);
}

TEST_CASE("matrix construction validates its elements") {
  CHECK_THROWS_AS(Matrix(2, {1.0, 2.0, 3.0}), std::invalid_argument);
  CHECK_THROWS_AS(Matrix(2, {1.0, 2.0, 3.0, std::nan("")}), std::invalid_argument);
  CHECK_THROWS_AS(Matrix(0), std::invalid_argument);
  const Matrix m(2, {1, 2, 3, 4});
  CHECK(m(1, 0) == 3.0);
  CHECK(m == Matrix(2, {1, 2, 3, 4}));
}

TEST_CASE("trace") {
  CHECK(trace(Matrix::identity(3)) == 3.0);
  CHECK(trace(Matrix(2, {1, 2, 3, 4})) == 5.0);
  CHECK(trace(Matrix::zero(4)) == 0.0);
}

TEST_CASE("det on fixed inputs") {
  for (int n = 1; n <= 5; ++n) CHECK(det(Matrix::identity(n)) == 1.0);
  CHECK(det(Matrix(2, {1, 2, 3, 4})) == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(det(Matrix(3, {1, 1, 1, 1, 1, 1, 1, 1, 1})) == 0.0);
}

TEST_CASE("det matches the cofactor oracle on random 4x4 matrices") {
  Rng rng(101);
  for (int c = 0; c < 200; ++c) {
    const Matrix x = random_matrix(rng, 4, -1.0, 1.0);
    const double want = oracle::cofactor_det(x);
    CHECK(std::abs(det(x) - want) <= 1e-12 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("det is exactly zero for duplicated rows") {
  Rng rng(102);
  for (int c = 0; c < 100; ++c) {
    const int n = rng.uniform_int(2, 6);
    Matrix x = random_matrix(rng, n, -1.0, 1.0);
    for (int j = 0; j < n; ++j) x(n - 1, j) = x(0, j);
    CHECK(det(x) == 0.0);
  }
}

TEST_CASE("is_invertible") {
  CHECK(is_invertible(Matrix::identity(5)));
  CHECK_FALSE(is_invertible(Matrix::zero(3)));
  // pivot after eliminating the second row is ~1e-15, below eps_inv
  CHECK_FALSE(is_invertible(Matrix(2, {1.0, 1.0, 1.0, 1.0 + 1e-15})));
  CHECK(is_invertible(Matrix(2, {1.0, 1.0, 1.0, 1.0 + 1e-15}), 1e-16));
}

TEST_CASE("inverse on fixed inputs") {
  CHECK(inverse(Matrix::identity(4)) == Matrix::identity(4));
  const Matrix inv = inverse(Matrix(2, {2, 0, 0, 4}));
  CHECK(inv(0, 0) == 0.5);
  CHECK(inv(1, 1) == 0.25);
  CHECK(inv(0, 1) == 0.0);
  CHECK_THROWS_AS(inverse(Matrix(3, {1, 1, 1, 1, 1, 1, 1, 1, 1})), SingularMatrix);
}

TEST_CASE("inverse residual stays within the contract bound") {
  Rng rng(103);
  for (int c = 0; c < 200; ++c) {
    const int n = rng.uniform_int(1, 6);
    const Matrix x = random_matrix(rng, n, -2.0, 2.0);
    if (!is_invertible(x)) continue;
    const double r = max_abs(mat_sub(mat_mul(x, inverse(x)), Matrix::identity(n)));
    CHECK(r <= 1e-10 * std::max(1.0, max_abs(x) * max_abs(x)));
  }
}

TEST_CASE("adjugate on fixed inputs") {
  CHECK(adjugate(Matrix::identity(4)) == Matrix::identity(4));
  CHECK(adjugate(Matrix(1, {-3.0})) == Matrix(1, {1.0}));
  const Matrix a = adjugate(Matrix(2, {1, 2, 3, 4}));
  CHECK(a(0, 0) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(a(0, 1) == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(a(1, 0) == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(a(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
  // every 2x2 minor of a rank-1 matrix vanishes
  CHECK(max_abs(adjugate(Matrix(3, {1, 1, 1, 1, 1, 1, 1, 1, 1}))) == 0.0);
}

TEST_CASE("adjugate matches the cofactor oracle on random 3x3 matrices") {
  Rng rng(104);
  for (int c = 0; c < 200; ++c) {
    const Matrix x = random_matrix(rng, 3, -1.0, 1.0);
    CHECK(max_abs(mat_sub(adjugate(x), oracle::cofactor_adjugate(x))) <= 1e-11);
  }
}

TEST_CASE("adjugate identity holds for singular inputs via the fallback") {
  Rng rng(105);
  for (int c = 0; c < 50; ++c) {
    // rank-1 outer product u v^T: singular for n >= 2
    const int n = rng.uniform_int(2, 5);
    Matrix x(n);
    std::vector<double> u(n), v(n);
    for (int i = 0; i < n; ++i) {
      u[i] = rng.uniform(-1.0, 1.0);
      v[i] = rng.uniform(-1.0, 1.0);
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) x(i, j) = u[i] * v[j];
    REQUIRE_FALSE(is_invertible(x));
    CHECK(max_abs(mat_mul(x, adjugate(x))) <= 1e-12);
    CHECK(max_abs(mat_mul(adjugate(x), x)) <= 1e-12);
  }
}

TEST_CASE("replaced_det_sum fixed inputs") {
  Rng rng(106);
  const Matrix f = random_matrix(rng, 3, -1.0, 1.0);
  CHECK(replaced_det_sum(Matrix::identity(3), f, ReplaceAxis::Rows) ==
        doctest::Approx(trace(f)).epsilon(1e-13));
  const Matrix x = random_matrix(rng, 4, -1.0, 1.0);
  for (const auto axis : {ReplaceAxis::Rows, ReplaceAxis::Columns}) {
    CHECK(replaced_det_sum(x, x, axis) == doctest::Approx(4.0 * det(x)).epsilon(1e-12));
  }
}

TEST_CASE("replaced_det_sum agrees with the cofactor-adjugate trace oracle") {
  Rng rng(107);
  for (int c = 0; c < 200; ++c) {
    const Matrix x = random_matrix(rng, 4, -1.0, 1.0);
    const Matrix f = random_matrix(rng, 4, -1.0, 1.0);
    const double want = trace(mat_mul(oracle::cofactor_adjugate(x), f));
    const double tol = 1e-11 * std::max(1.0, std::abs(want));
    CHECK(std::abs(replaced_det_sum(x, f, ReplaceAxis::Rows) - want) <= tol);
    CHECK(std::abs(replaced_det_sum(x, f, ReplaceAxis::Columns) - want) <= tol);
  }
}

TEST_CASE("matrix arithmetic basics") {
  Rng rng(108);
  const Matrix m = random_matrix(rng, 3, -1.0, 1.0);
  CHECK(mat_mul(Matrix::identity(3), m) == m);
  CHECK(mat_scale(0.0, m) == Matrix::zero(3));
  CHECK(mat_sub(m, m) == Matrix::zero(3));
  CHECK(mat_add(m, Matrix::zero(3)) == m);
  CHECK_THROWS_AS(mat_add(m, Matrix::zero(2)), DimensionMismatch);
  CHECK_THROWS_AS(mat_mul(m, Matrix::zero(4)), DimensionMismatch);
  CHECK_THROWS_AS(replaced_det_sum(m, Matrix::zero(2), ReplaceAxis::Rows), DimensionMismatch);
}

TEST_CASE("matmul associativity within roundoff") {
  Rng rng(109);
  for (int c = 0; c < 100; ++c) {
    const Matrix a = random_matrix(rng, 3, -1.0, 1.0);
    const Matrix b = random_matrix(rng, 3, -1.0, 1.0);
    const Matrix d = random_matrix(rng, 3, -1.0, 1.0);
    CHECK(max_abs(mat_sub(mat_mul(mat_mul(a, b), d), mat_mul(a, mat_mul(b, d)))) <= 1e-13);
  }
}

TEST_CASE("trace_of_product equals trace of the materialized product") {
  Rng rng(110);
  for (int c = 0; c < 100; ++c) {
    const int n = rng.uniform_int(1, 6);
    const Matrix p = random_matrix(rng, n, -2.0, 2.0);
    const Matrix q = random_matrix(rng, n, -2.0, 2.0);
    const double want = trace(mat_mul(p, q));
    CHECK(std::abs(trace_of_product(p, q) - want) <= 1e-12 * std::max(1.0, std::abs(want)));
  }
}
