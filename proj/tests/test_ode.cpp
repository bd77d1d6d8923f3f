#include <cmath>
#include <stdexcept>

#include "doctest.h"

#include "detflow/check.hpp"
#include "detflow/errors.hpp"
#include "detflow/ode.hpp"
#include "detflow/random.hpp"
#include "oracles.hpp"

using namespace detflow;

namespace {

Scenario zero_coeff_scenario(int n) {
  Scenario s;
  s.n = n;
  s.x0 = Matrix::identity(n);
  s.a = ZeroCoeff{n};
  s.b = ZeroCoeff{n};
  s.f = ZeroCoeff{n};
  return s;
}

}  // namespace

TEST_CASE("rhs solves the defining equation for dX/dt") {
  Rng rng(301);
  // A = B = 0, F = C: the derivative is C regardless of X
  Scenario s = zero_coeff_scenario(3);
  const Matrix c = random_matrix(rng, 3, -1.0, 1.0);
  s.f = ConstantCoeff{c};
  CHECK(rhs(0.3, random_matrix(rng, 3, -1.0, 1.0), s) == c);

  // F = 0, B = 0, A = I at X = I: derivative is -I
  Scenario s2 = zero_coeff_scenario(2);
  s2.a = ConstantCoeff{Matrix::identity(2)};
  CHECK(rhs(0.0, Matrix::identity(2), s2) == mat_scale(-1.0, Matrix::identity(2)));

  // scalar: -(a+b) x
  Scenario s3 = zero_coeff_scenario(1);
  s3.a = ConstantCoeff{Matrix(1, {0.3})};
  s3.b = ConstantCoeff{Matrix(1, {0.7})};
  CHECK(rhs(0.5, Matrix(1, {2.0}), s3)(0, 0) == doctest::Approx(-2.0).epsilon(1e-15));
}

TEST_CASE("det_rhs on fixed inputs") {
  Scenario s = zero_coeff_scenario(2);
  s.a = ConstantCoeff{Matrix(2, {1, 0, 0, 2})};
  s.b = ConstantCoeff{Matrix(2, {3, 0, 0, 4})};
  // F = 0: homogeneous reduction to -tr[A+B] d
  CHECK(det_rhs(0.0, Matrix::identity(2), 0.5, s) == doctest::Approx(-5.0).epsilon(1e-14));

  Scenario s2 = zero_coeff_scenario(2);
  s2.f = ConstantCoeff{Matrix::identity(2)};
  CHECK(det_rhs(0.0, Matrix::identity(2), 1.0, s2) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("det_rhs matches the cofactor-oracle expression on random inputs") {
  Rng rng(302);
  for (int c = 0; c < 100; ++c) {
    const int n = rng.uniform_int(1, 4);
    Scenario s = zero_coeff_scenario(n);
    s.a = ConstantCoeff{random_matrix(rng, n, -1.0, 1.0)};
    s.b = ConstantCoeff{random_matrix(rng, n, -1.0, 1.0)};
    s.f = ConstantCoeff{random_matrix(rng, n, -1.0, 1.0)};
    const Matrix x = random_matrix(rng, n, -1.0, 1.0);
    const double d = rng.uniform(-2.0, 2.0);
    const Matrix a = eval_coeff(s.a, 0.0);
    const Matrix b = eval_coeff(s.b, 0.0);
    const Matrix f = eval_coeff(s.f, 0.0);
    const double want =
        trace(mat_mul(oracle::cofactor_adjugate(x), f)) - (trace(a) + trace(b)) * d;
    CHECK(std::abs(det_rhs(0.0, x, d, s) - want) <= 1e-12 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("rk4 grid layout is exact") {
  Scenario s = zero_coeff_scenario(1);
  s.solver.h = 0.3;  // ceil(1/0.3) = 4 uniform steps of 0.25
  const Trajectory traj = integrate(s);
  REQUIRE(traj.times.size() == 5);
  CHECK(traj.times[0] == 0.0);
  CHECK(traj.times[1] == 0.25);
  CHECK(traj.times[2] == 0.5);
  CHECK(traj.times[3] == 0.75);
  CHECK(traj.times.back() == 1.0);
  CHECK(traj.step_stats.accepted == 4);
  CHECK(traj.step_stats.rejected == 0);

  s.solver.h = 1e-3;
  CHECK(integrate(s).times.size() == 1001);
}

TEST_CASE("trajectory initial invariants hold exactly") {
  Rng rng(303);
  const Scenario s = random_smooth_scenario(rng, smooth_default_options());
  const Trajectory traj = integrate(s);
  CHECK(traj.det_direct[0] == traj.det_ode[0]);
  CHECK(traj.det_direct[0] == det(s.x0));
  CHECK(traj.cum_trace[0] == 0.0);
  CHECK(traj.x_samples[0] == s.x0);
  for (std::size_t k = 1; k < traj.times.size(); ++k) {
    CHECK(traj.times[k] > traj.times[k - 1]);
  }
  CHECK(traj.x_samples.size() == traj.times.size());
  CHECK(traj.det_direct.size() == traj.times.size());
  CHECK(traj.det_ode.size() == traj.times.size());
  CHECK(traj.cum_trace.size() == traj.times.size());
}

TEST_CASE("scalar decay reaches 2e^-1 within 1e-9") {
  const Trajectory traj = integrate(scalar_decay_scenario(1e-3));
  const double want = 2.0 * std::exp(-1.0);
  CHECK(std::abs(traj.x_samples.back()(0, 0) - want) <= 1e-9);
  CHECK(std::abs(traj.det_ode.back() - want) <= 1e-9);
}

TEST_CASE("nilpotent forcing integrates exactly to rounding") {
  const Trajectory traj = integrate(nilpotent_scenario(1e-3));
  const Matrix& end = traj.x_samples.back();
  CHECK(end(0, 0) == 1.0);
  CHECK(end(1, 0) == 0.0);
  CHECK(end(1, 1) == 1.0);
  CHECK(end(0, 1) == doctest::Approx(2.0).epsilon(1e-12));
  for (double d : traj.det_direct) CHECK(d == 1.0);
  for (double d : traj.det_ode) CHECK(std::abs(d - 1.0) <= 1e-12);
}

TEST_CASE("diagonal homogeneous determinant hits e^-2 at t=0.2") {
  const Trajectory traj = integrate(diagonal_homogeneous_scenario(1e-3, 0.2));
  const double want = std::exp(-2.0);
  CHECK(std::abs(traj.det_direct.back() - want) <= 1e-8 * want);
}

TEST_CASE("self-convergence against a fine-step reference run") {
  // sinusoidal A, constant B, polynomial F, n = 3
  Scenario s = zero_coeff_scenario(3);
  Rng rng(304);
  s.a = SinusoidalCoeff{random_matrix(rng, 3, -0.3, 0.3), random_matrix(rng, 3, -0.3, 0.3),
                        2.0, 0.4};
  s.b = ConstantCoeff{random_matrix(rng, 3, -0.3, 0.3)};
  s.f = PolynomialCoeff{{random_matrix(rng, 3, -0.5, 0.5), random_matrix(rng, 3, -0.5, 0.5)}};
  s.x0 = Matrix::identity(3);
  s.solver.h = 1e-3;
  const Matrix coarse = integrate(s).x_samples.back();
  s.solver.h = 1e-5;
  const Matrix fine = integrate(s).x_samples.back();
  CHECK(max_abs(mat_sub(coarse, fine)) <= 1e-8);
}

TEST_CASE("rkf45 integrates the scalar decay accurately") {
  Scenario s = scalar_decay_scenario(1e-3);
  s.solver.method = SolveMethod::Rkf45Adaptive;
  s.solver.tol = 1e-8;
  const Trajectory traj = integrate(s);
  CHECK(traj.times.back() == 1.0);
  CHECK(traj.step_stats.accepted == traj.times.size() - 1);
  for (std::size_t k = 1; k < traj.times.size(); ++k) {
    CHECK(traj.times[k] > traj.times[k - 1]);
  }
  CHECK(std::abs(traj.x_samples.back()(0, 0) - 2.0 * std::exp(-1.0)) <= 1e-6);
}

TEST_CASE("rkf45 throws StepSizeUnderflow when every step is rejected") {
  // the stages overflow at any step size wide enough to make progress, so the
  // error estimate stays non-finite and the controller shrinks h to the floor
  Scenario s = zero_coeff_scenario(1);
  s.x0 = Matrix(1, {2.0});
  s.a = ConstantCoeff{Matrix(1, {1e200})};
  s.solver.method = SolveMethod::Rkf45Adaptive;
  s.solver.tol = 1e-8;
  CHECK_THROWS_AS(integrate(s), StepSizeUnderflow);
}

TEST_CASE("integrate throws NonFiniteState when the state blows past doubles") {
  Scenario s = zero_coeff_scenario(1);
  s.x0 = Matrix(1, {2.0});
  s.a = ConstantCoeff{Matrix(1, {1e200})};
  s.solver.h = 1.0;
  CHECK_THROWS_AS(integrate(s), NonFiniteState);
}

TEST_CASE("operator_residual behaves like the central-difference defect") {
  // exact trajectory: residual at rounding level
  const Scenario nil = nilpotent_scenario(1e-3);
  const Trajectory nil_traj = integrate(nil);
  CHECK(operator_residual(nil_traj, nil) <= 1e-10);

  // correct rk4 run: dominated by O(h^2) finite-difference truncation
  const Scenario diag = diagonal_homogeneous_scenario(1e-3, 1.0);
  Trajectory diag_traj = integrate(diag);
  const double r = operator_residual(diag_traj, diag);
  CHECK(r <= 1e-4);
  CHECK(r >= 1e-7);

  // a perturbed sample is amplified by 1/(2h)
  diag_traj.x_samples[500](0, 0) += 1e-3;
  CHECK(operator_residual(diag_traj, diag) >= 1e-2);
}

TEST_CASE("operator_residual needs at least three grid points") {
  Scenario s = zero_coeff_scenario(1);
  s.solver.h = 2.0;  // single step over [0, 1]
  const Trajectory traj = integrate(s);
  REQUIRE(traj.times.size() == 2);
  CHECK_THROWS_AS(operator_residual(traj, s), std::invalid_argument);
}
