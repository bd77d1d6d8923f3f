#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"

#include "detflow/check.hpp"
#include "detflow/coeffs.hpp"
#include "detflow/errors.hpp"
#include "detflow/random.hpp"

using namespace detflow;

namespace {

bool has_issue_containing(const std::vector<std::string>& issues, const std::string& needle) {
  for (const auto& s : issues) {
    if (s.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("eval_coeff constant and zero kinds") {
  const Matrix c(2, {1, 2, 3, 4});
  const CoefficientSpec k = ConstantCoeff{c};
  CHECK(eval_coeff(k, 0.0) == c);
  CHECK(eval_coeff(k, -17.5) == c);
  CHECK(eval_coeff(CoefficientSpec{ZeroCoeff{3}}, 2.0) == Matrix::zero(3));
}

TEST_CASE("eval_coeff tabulated linear interpolation") {
  const TabulatedCoeff tab{{0.0, 1.0}, {Matrix::zero(2), Matrix::identity(2)}};
  const CoefficientSpec c = tab;
  CHECK(eval_coeff(c, 0.5) == mat_scale(0.5, Matrix::identity(2)));
  // exact at knots
  CHECK(eval_coeff(c, 0.0) == Matrix::zero(2));
  CHECK(eval_coeff(c, 1.0) == Matrix::identity(2));
  // endpoint slop absorbs integrator stage-time rounding
  CHECK(eval_coeff(c, 1.0 + 1e-15) == Matrix::identity(2));
  CHECK_THROWS_AS(eval_coeff(c, 1.5), OutOfRange);
  CHECK_THROWS_AS(eval_coeff(c, -0.1), OutOfRange);
}

TEST_CASE("eval_coeff tabulated multi-segment") {
  const TabulatedCoeff tab{{0.0, 1.0, 3.0},
                           {Matrix(1, {0.0}), Matrix(1, {2.0}), Matrix(1, {6.0})}};
  const CoefficientSpec c = tab;
  CHECK(eval_coeff(c, 0.5)(0, 0) == doctest::Approx(1.0));
  CHECK(eval_coeff(c, 2.0)(0, 0) == doctest::Approx(4.0));
  CHECK(eval_coeff(c, 3.0)(0, 0) == doctest::Approx(6.0));
}

TEST_CASE("eval_coeff sinusoidal") {
  const CoefficientSpec c =
      SinusoidalCoeff{Matrix::zero(2), Matrix::identity(2), 2.0, 0.0};
  const Matrix v = eval_coeff(c, std::acos(-1.0) / 4.0);  // sin(pi/2) = 1
  CHECK(v(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(v(0, 1) == 0.0);
  const CoefficientSpec shifted =
      SinusoidalCoeff{Matrix::identity(1), Matrix::identity(1), 1.0, std::acos(-1.0) / 2.0};
  CHECK(eval_coeff(shifted, 0.0)(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("eval_coeff polynomial Horner evaluation") {
  // C0 + C1 t + C2 t^2 at t = 2 -> C0 + 2 C1 + 4 C2
  const PolynomialCoeff p{{Matrix(1, {1.0}), Matrix(1, {3.0}), Matrix(1, {5.0})}};
  CHECK(eval_coeff(CoefficientSpec{p}, 2.0)(0, 0) == doctest::Approx(27.0));
  // degree 0 agrees with the constant kind everywhere
  const PolynomialCoeff p0{{Matrix(2, {1, 2, 3, 4})}};
  const ConstantCoeff k{Matrix(2, {1, 2, 3, 4})};
  for (double t : {-2.0, 0.0, 0.7, 42.0}) {
    CHECK(eval_coeff(CoefficientSpec{p0}, t) == eval_coeff(CoefficientSpec{k}, t));
  }
}

TEST_CASE("eval_coeff is deterministic") {
  Rng rng(201);
  const Scenario s = random_smooth_scenario(rng, smooth_default_options());
  for (double t : {0.0, 0.3333333333333333, 0.9999999999}) {
    CHECK(eval_coeff(s.a, t) == eval_coeff(s.a, t));
    CHECK(eval_coeff(s.f, t) == eval_coeff(s.f, t));
  }
}

TEST_CASE("validate accepts a well-formed scenario") {
  Rng rng(202);
  const Scenario s = random_smooth_scenario(rng, smooth_default_options());
  CHECK(validate_issues(s).empty());
  CHECK_NOTHROW(validate(s));
}

TEST_CASE("validate flags an empty interval") {
  Scenario s;
  s.t_end = s.t0;
  const auto issues = validate_issues(s);
  CHECK(has_issue_containing(issues, "empty interval"));
  CHECK_THROWS_AS(validate(s), ValidationError);
}

TEST_CASE("validate flags dimension mismatches") {
  Scenario s;
  s.n = 3;
  s.x0 = Matrix::identity(2);
  s.a = ZeroCoeff{3};
  s.b = ZeroCoeff{3};
  s.f = ZeroCoeff{3};
  CHECK(has_issue_containing(validate_issues(s), "dimension mismatch"));

  Scenario s2;
  s2.n = 2;
  s2.x0 = Matrix::identity(2);
  s2.a = ConstantCoeff{Matrix::identity(3)};
  s2.b = ZeroCoeff{2};
  s2.f = ZeroCoeff{2};
  CHECK(has_issue_containing(validate_issues(s2), "dimension mismatch"));
}

TEST_CASE("validate flags dimension bounds") {
  Scenario s;
  s.n = 0;
  CHECK(has_issue_containing(validate_issues(s), "out of range"));
  s.n = 65;
  CHECK(has_issue_containing(validate_issues(s), "out of range"));
}

TEST_CASE("validate flags tabulated problems") {
  Scenario s;
  s.n = 1;
  s.x0 = Matrix(1, {1.0});
  s.t0 = 0.0;
  s.t_end = 1.0;
  s.b = ZeroCoeff{1};
  s.f = ZeroCoeff{1};

  s.a = TabulatedCoeff{{0.0, 0.5, 0.5}, {Matrix(1, {1.0}), Matrix(1, {2.0}), Matrix(1, {3.0})}};
  CHECK(has_issue_containing(validate_issues(s), "strictly increasing"));

  s.a = TabulatedCoeff{{0.0, 0.5}, {Matrix(1, {1.0}), Matrix(1, {2.0})}};
  CHECK(has_issue_containing(validate_issues(s), "cover"));

  s.a = TabulatedCoeff{{0.0}, {Matrix(1, {1.0})}};
  CHECK(has_issue_containing(validate_issues(s), "at least 2 knots"));
}

TEST_CASE("validate flags solver configuration") {
  Scenario s;
  s.solver.method = SolveMethod::Rk4Fixed;
  s.solver.h = 0.0;
  CHECK(has_issue_containing(validate_issues(s), "h must be positive"));
  s.solver.method = SolveMethod::Rkf45Adaptive;
  s.solver.tol = -1.0;
  CHECK(has_issue_containing(validate_issues(s), "tolerance must be positive"));
}

TEST_CASE("validate reports every violation at once") {
  Scenario s;
  s.n = 3;
  s.x0 = Matrix::identity(2);
  s.t_end = s.t0 - 1.0;
  s.a = ZeroCoeff{3};
  s.b = ZeroCoeff{3};
  s.f = ZeroCoeff{3};
  try {
    validate(s);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.issues().size() >= 2);
  }
}

TEST_CASE("kind_name and is_zero_kind") {
  CHECK(std::string(kind_name(CoefficientSpec{ZeroCoeff{1}})) == "zero");
  CHECK(std::string(kind_name(CoefficientSpec{SinusoidalCoeff{Matrix(1, {0.0}),
                                                              Matrix(1, {1.0}), 1.0, 0.0}})) ==
        "sinusoidal");
  CHECK(is_zero_kind(CoefficientSpec{ZeroCoeff{4}}));
  CHECK_FALSE(is_zero_kind(CoefficientSpec{ConstantCoeff{Matrix::zero(4)}}));
}
