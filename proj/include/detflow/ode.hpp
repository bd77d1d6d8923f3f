#pragma once

#include <cstddef>
#include <vector>

#include "detflow/coeffs.hpp"
#include "detflow/matrix.hpp"

namespace detflow {

struct StepStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

// One integration run. All arrays share the grid length; times are strictly
// increasing from t0 to t_end. det_direct[k] is det(x_samples[k]) recomputed
// per sample; det_ode is the coupled scalar-ODE determinant channel;
// cum_trace[k] is the integral of tr[A+B] from t0 to times[k], carried as an
// extra state component so it has the same accuracy order as X.
struct Trajectory {
  std::vector<double> times;
  std::vector<Matrix> x_samples;
  std::vector<double> det_direct;
  std::vector<double> det_ode;
  std::vector<double> cum_trace;
  StepStats step_stats;
};

// dX/dt solved from the defining equation: F(t) - A(t)X - XB(t).
Matrix rhs(double t, const Matrix& x, const Scenario& s);

// Scalar determinant derivative: trace(adjugate(X) F(t)) - trace(A+B) d.
// X is the evolving matrix state; d is the independently integrated estimate.
double det_rhs(double t, const Matrix& x, double d, const Scenario& s);

// Integrates the coupled (n^2 + 2)-dimensional system over [t0, t_end].
// rk4-fixed takes exactly ceil((t_end - t0)/h) uniform steps; rkf45-adaptive
// bounds the embedded per-step max-norm error by tol and records a sample at
// every accepted step. Throws StepSizeUnderflow when the adaptive step drops
// below 1e-14 * (t_end - t0) and NonFiniteState if X picks up a NaN/Inf.
Trajectory integrate(const Scenario& s);

// Max over interior grid points of the max-norm defect
// | central-difference dX + A X + X B - F |. An integrator sanity metric;
// dominated by the O(h^2) finite-difference truncation on correct runs.
double operator_residual(const Trajectory& traj, const Scenario& s);

}  // namespace detflow
