#include "detflow/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "detflow/errors.hpp"

namespace detflow {

namespace {

Matrix rhs_from(const Matrix& a, const Matrix& b, const Matrix& f, const Matrix& x) {
  return mat_sub(mat_sub(f, mat_mul(a, x)), mat_mul(x, b));
}

// Packed state layout: n*n entries of X (row-major), then the determinant
// channel, then the cumulative trace integral.
struct System {
  const Scenario& s;
  int n;
  std::size_t dim() const { return static_cast<std::size_t>(n) * n + 2; }

  Matrix unpack_x(const std::vector<double>& v) const {
    Matrix x(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) x(i, j) = v[static_cast<std::size_t>(i) * n + j];
    return x;
  }

  void deriv(double t, const std::vector<double>& v, std::vector<double>& out) const {
    const Matrix x = unpack_x(v);
    const Matrix a = eval_coeff(s.a, t);
    const Matrix b = eval_coeff(s.b, t);
    const Matrix f = eval_coeff(s.f, t);
    const Matrix xdot = rhs_from(a, b, f, x);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(i) * n + j] = xdot(i, j);
    const double tr_ab = trace(a) + trace(b);
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    out[nn] = trace_of_product(adjugate(x), f) - tr_ab * v[nn];
    out[nn + 1] = tr_ab;
  }
};

void rk4_step(const System& sys, double t, double h, const std::vector<double>& y,
              std::vector<double>& y_next, std::vector<double>& k1, std::vector<double>& k2,
              std::vector<double>& k3, std::vector<double>& k4, std::vector<double>& tmp) {
  const std::size_t d = sys.dim();
  sys.deriv(t, y, k1);
  for (std::size_t i = 0; i < d; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
  sys.deriv(t + 0.5 * h, tmp, k2);
  for (std::size_t i = 0; i < d; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
  sys.deriv(t + 0.5 * h, tmp, k3);
  for (std::size_t i = 0; i < d; ++i) tmp[i] = y[i] + h * k3[i];
  sys.deriv(t + h, tmp, k4);
  for (std::size_t i = 0; i < d; ++i) {
    y_next[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
}

// Fehlberg 4(5) tableau.
namespace rkf {
constexpr double c2 = 1.0 / 4.0, c3 = 3.0 / 8.0, c4 = 12.0 / 13.0, c5 = 1.0, c6 = 1.0 / 2.0;
constexpr double a21 = 1.0 / 4.0;
constexpr double a31 = 3.0 / 32.0, a32 = 9.0 / 32.0;
constexpr double a41 = 1932.0 / 2197.0, a42 = -7200.0 / 2197.0, a43 = 7296.0 / 2197.0;
constexpr double a51 = 439.0 / 216.0, a52 = -8.0, a53 = 3680.0 / 513.0, a54 = -845.0 / 4104.0;
constexpr double a61 = -8.0 / 27.0, a62 = 2.0, a63 = -3544.0 / 2565.0, a64 = 1859.0 / 4104.0,
                 a65 = -11.0 / 40.0;
// 4th order weights
constexpr double b1 = 25.0 / 216.0, b3 = 1408.0 / 2565.0, b4 = 2197.0 / 4104.0, b5 = -1.0 / 5.0;
// 5th order weights
constexpr double e1 = 16.0 / 135.0, e3 = 6656.0 / 12825.0, e4 = 28561.0 / 56430.0,
                 e5 = -9.0 / 50.0, e6 = 2.0 / 55.0;
}  // namespace rkf

struct Rkf45Workspace {
  std::vector<double> k1, k2, k3, k4, k5, k6, tmp, y4, y5;
  explicit Rkf45Workspace(std::size_t d)
      : k1(d), k2(d), k3(d), k4(d), k5(d), k6(d), tmp(d), y4(d), y5(d) {}
};

// One embedded step; returns the max-norm difference of the 4th and 5th
// order solutions across all state components.
double rkf45_step(const System& sys, double t, double h, const std::vector<double>& y,
                  Rkf45Workspace& w) {
  using namespace rkf;
  const std::size_t d = sys.dim();
  sys.deriv(t, y, w.k1);
  for (std::size_t i = 0; i < d; ++i) w.tmp[i] = y[i] + h * (a21 * w.k1[i]);
  sys.deriv(t + c2 * h, w.tmp, w.k2);
  for (std::size_t i = 0; i < d; ++i) w.tmp[i] = y[i] + h * (a31 * w.k1[i] + a32 * w.k2[i]);
  sys.deriv(t + c3 * h, w.tmp, w.k3);
  for (std::size_t i = 0; i < d; ++i)
    w.tmp[i] = y[i] + h * (a41 * w.k1[i] + a42 * w.k2[i] + a43 * w.k3[i]);
  sys.deriv(t + c4 * h, w.tmp, w.k4);
  for (std::size_t i = 0; i < d; ++i)
    w.tmp[i] = y[i] + h * (a51 * w.k1[i] + a52 * w.k2[i] + a53 * w.k3[i] + a54 * w.k4[i]);
  sys.deriv(t + c5 * h, w.tmp, w.k5);
  for (std::size_t i = 0; i < d; ++i)
    w.tmp[i] = y[i] + h * (a61 * w.k1[i] + a62 * w.k2[i] + a63 * w.k3[i] + a64 * w.k4[i] +
                           a65 * w.k5[i]);
  sys.deriv(t + c6 * h, w.tmp, w.k6);

  double err = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    w.y4[i] = y[i] + h * (b1 * w.k1[i] + b3 * w.k3[i] + b4 * w.k4[i] + b5 * w.k5[i]);
    w.y5[i] = y[i] + h * (e1 * w.k1[i] + e3 * w.k3[i] + e4 * w.k4[i] + e5 * w.k5[i] +
                          e6 * w.k6[i]);
    const double e = std::fabs(w.y5[i] - w.y4[i]);
    // a NaN difference means the stages overflowed; report an infinite error
    // so the step is rejected no matter what the other components look like
    if (std::isnan(e)) return std::numeric_limits<double>::infinity();
    if (e > err) err = e;
  }
  return err;
}

void check_x_finite(const Matrix& x, double t) {
  for (double v : x.elems()) {
    if (!std::isfinite(v)) {
      throw NonFiniteState("state left the finite range at t=" + std::to_string(t));
    }
  }
}

}  // namespace

Matrix rhs(double t, const Matrix& x, const Scenario& s) {
  return rhs_from(eval_coeff(s.a, t), eval_coeff(s.b, t), eval_coeff(s.f, t), x);
}

double det_rhs(double t, const Matrix& x, double d, const Scenario& s) {
  const Matrix a = eval_coeff(s.a, t);
  const Matrix b = eval_coeff(s.b, t);
  const Matrix f = eval_coeff(s.f, t);
  return trace_of_product(adjugate(x), f) - (trace(a) + trace(b)) * d;
}

Trajectory integrate(const Scenario& s) {
  const System sys{s, s.n};
  const std::size_t d = sys.dim();
  const std::size_t nn = static_cast<std::size_t>(s.n) * s.n;
  const double span = s.t_end - s.t0;

  Trajectory traj;
  std::vector<double> y(d);
  for (std::size_t i = 0; i < nn; ++i) y[i] = s.x0.elems()[i];
  const double det0 = det(s.x0);
  y[nn] = det0;
  y[nn + 1] = 0.0;

  auto record = [&](double t, const std::vector<double>& state, bool initial) {
    const Matrix x = sys.unpack_x(state);
    check_x_finite(x, t);
    traj.times.push_back(t);
    traj.x_samples.push_back(x);
    // det_direct[0] and det_ode[0] are the same det(X0) value by construction
    traj.det_direct.push_back(initial ? det0 : det(x));
    traj.det_ode.push_back(state[nn]);
    traj.cum_trace.push_back(state[nn + 1]);
  };
  record(s.t0, y, true);

  if (s.solver.method == SolveMethod::Rk4Fixed) {
    const std::size_t m = static_cast<std::size_t>(
        std::max(1.0, std::ceil(span / s.solver.h)));
    const double hs = span / static_cast<double>(m);
    std::vector<double> y_next(d), k1(d), k2(d), k3(d), k4(d), tmp(d);
    for (std::size_t k = 0; k < m; ++k) {
      const double t_k = s.t0 + static_cast<double>(k) * hs;
      rk4_step(sys, t_k, hs, y, y_next, k1, k2, k3, k4, tmp);
      y.swap(y_next);
      const double t_next = (k + 1 == m) ? s.t_end : s.t0 + static_cast<double>(k + 1) * hs;
      record(t_next, y, false);
      ++traj.step_stats.accepted;
    }
    return traj;
  }

  // rkf45 adaptive
  const double tol = s.solver.tol;
  const double h_min = 1e-14 * span;
  double h = std::clamp(span / 100.0, 1e-12, span);
  double t = s.t0;
  Rkf45Workspace w(d);
  while (t < s.t_end) {
    bool last = false;
    if (t + h >= s.t_end) {
      h = s.t_end - t;
      last = true;
    }
    const double err = rkf45_step(sys, t, h, y, w);
    if (err <= tol) {
      t = last ? s.t_end : t + h;
      y = w.y5;  // propagate the 5th-order solution
      record(t, y, false);
      ++traj.step_stats.accepted;
      double factor = (err > 0.0) ? 0.9 * std::pow(tol / err, 0.2) : 5.0;
      factor = std::clamp(factor, 0.2, 5.0);
      h = std::min(h * factor, span);
    } else {
      ++traj.step_stats.rejected;
      double factor = std::isfinite(err) ? 0.9 * std::pow(tol / err, 0.25) : 0.1;
      factor = std::clamp(factor, 0.1, 0.9);
      h *= factor;
      if (h < h_min) {
        throw StepSizeUnderflow("adaptive step fell below 1e-14 * (t_end - t0) at t=" +
                                std::to_string(t));
      }
    }
  }
  return traj;
}

double operator_residual(const Trajectory& traj, const Scenario& s) {
  const std::size_t m = traj.times.size();
  if (m < 3) {
    throw std::invalid_argument("operator_residual needs a trajectory with >= 3 points");
  }
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < m; ++k) {
    const double dt = traj.times[k + 1] - traj.times[k - 1];
    const Matrix xdot =
        mat_scale(1.0 / dt, mat_sub(traj.x_samples[k + 1], traj.x_samples[k - 1]));
    const double t_k = traj.times[k];
    const Matrix a = eval_coeff(s.a, t_k);
    const Matrix b = eval_coeff(s.b, t_k);
    const Matrix f = eval_coeff(s.f, t_k);
    const Matrix defect = mat_sub(
        mat_add(xdot, mat_add(mat_mul(a, traj.x_samples[k]), mat_mul(traj.x_samples[k], b))),
        f);
    worst = std::max(worst, max_abs(defect));
  }
  return worst;
}

}  // namespace detflow
