#include "detflow/identity.hpp"

#include <cmath>
#include <cstddef>

#include "detflow/errors.hpp"

namespace detflow {

namespace {

// Exponents past this magnitude become overflow markers instead of Inf.
constexpr double kExpGuard = 700.0;

std::vector<double> prefix(const std::vector<double>& v, std::size_t count) {
  return std::vector<double>(v.begin(), v.begin() + count);
}

// Shared integrating-factor evaluation for the two integral identities.
// integrand[j] is the raw integrand (tr[adj X F] or the replacement sum) at
// grid point j; the weight e^{cum_trace} and the final e^{-cum_trace} factor
// are applied here. Once |cum_trace| passes the guard the quadrature sums are
// contaminated, so every later point is marked Overflow.
DetSeries integral_identity(const Trajectory& traj, const std::vector<double>& integrand) {
  const std::size_t m = traj.times.size();
  const double det0 = traj.det_direct[0];

  std::size_t usable = m;
  for (std::size_t j = 0; j < m; ++j) {
    if (std::fabs(traj.cum_trace[j]) > kExpGuard) {
      usable = j;
      break;
    }
  }

  std::vector<double> g(usable);
  for (std::size_t j = 0; j < usable; ++j) {
    g[j] = integrand[j] * std::exp(traj.cum_trace[j]);
  }
  const std::vector<double> q =
      cumulative_quadrature(prefix(traj.times, usable), g);

  DetSeries out;
  out.values.assign(m, 0.0);
  out.status.assign(m, PointStatus::Overflow);
  for (std::size_t k = 0; k < usable; ++k) {
    const double v = std::exp(-traj.cum_trace[k]) * (q[k] + det0);
    if (std::isfinite(v)) {
      out.values[k] = v;
      out.status[k] = PointStatus::Ok;
    }
  }
  return out;
}

struct ChannelDrift {
  std::optional<double> max_drift;
  std::optional<double> terminal;
};

ChannelDrift drift_of(const DetSeries& series, const Trajectory& traj) {
  ChannelDrift out;
  double worst = -1.0;
  for (std::size_t k = 0; k < series.size(); ++k) {
    if (!series.ok(k) || !std::isfinite(traj.det_direct[k])) continue;
    const double d = rel_drift(series.values[k], traj.det_direct[k]);
    if (d > worst) worst = d;
  }
  if (worst >= 0.0) out.max_drift = worst;
  const std::size_t last = series.size() - 1;
  if (series.ok(last)) out.terminal = series.values[last];
  return out;
}

}  // namespace

std::vector<double> cumulative_trapezoid(const std::vector<double>& t,
                                         const std::vector<double>& g) {
  std::vector<double> q(t.size(), 0.0);
  for (std::size_t k = 1; k < t.size(); ++k) {
    q[k] = q[k - 1] + 0.5 * (t[k] - t[k - 1]) * (g[k - 1] + g[k]);
  }
  return q;
}

std::vector<double> cumulative_simpson(const std::vector<double>& t,
                                       const std::vector<double>& g) {
  const std::size_t m = t.size();
  std::vector<double> q(m, 0.0);
  const double h = (t.back() - t.front()) / static_cast<double>(m - 1);
  // k = 1: integrate the fitted quadratic over the first subinterval only
  q[1] = h * (5.0 * g[0] + 8.0 * g[1] - g[2]) / 12.0;
  for (std::size_t k = 2; k < m; ++k) {
    if (k % 2 == 0) {
      q[k] = q[k - 2] + h * (g[k - 2] + 4.0 * g[k - 1] + g[k]) / 3.0;
    } else {
      q[k] = q[k - 1] + h * (-g[k - 2] + 8.0 * g[k - 1] + 5.0 * g[k]) / 12.0;
    }
  }
  return q;
}

bool is_uniform_grid(const std::vector<double>& t) {
  if (t.size() < 2) return true;
  const double h = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  for (std::size_t k = 1; k < t.size(); ++k) {
    if (std::fabs((t[k] - t[k - 1]) - h) > 1e-9 * h) return false;
  }
  return true;
}

std::vector<double> cumulative_quadrature(const std::vector<double>& t,
                                          const std::vector<double>& g) {
  const std::size_t m = t.size();
  if (m >= 3 && (m - 1) % 2 == 0 && is_uniform_grid(t)) {
    return cumulative_simpson(t, g);
  }
  return cumulative_trapezoid(t, g);
}

DetSeries eq2_det(const Scenario& s, const Trajectory& traj) {
  if (!is_zero_kind(s.f)) {
    throw NotHomogeneous("eq2_det requires the zero forcing kind, got " +
                         std::string(kind_name(s.f)));
  }
  const std::size_t m = traj.times.size();
  const double det0 = traj.det_direct[0];
  DetSeries out;
  out.values.assign(m, 0.0);
  out.status.assign(m, PointStatus::Ok);
  if (det0 == 0.0) return out;  // identically zero, no exponent to guard
  const double log_d0 = std::log(std::fabs(det0));
  for (std::size_t k = 0; k < m; ++k) {
    if (log_d0 - traj.cum_trace[k] > kExpGuard) {
      out.status[k] = PointStatus::Overflow;
    } else {
      out.values[k] = det0 * std::exp(-traj.cum_trace[k]);
    }
  }
  return out;
}

DetSeries eq5_det(const Scenario& s, const Trajectory& traj) {
  const std::size_t m = traj.times.size();
  std::vector<double> integrand(m);
  for (std::size_t j = 0; j < m; ++j) {
    integrand[j] =
        trace_of_product(adjugate(traj.x_samples[j]), eval_coeff(s.f, traj.times[j]));
  }
  return integral_identity(traj, integrand);
}

DetSeries eq4_det(const Scenario& s, const Trajectory& traj) {
  if (!is_zero_kind(s.b)) {
    throw NotLeftOnly("eq4_det requires the zero right-coefficient kind, got " +
                      std::string(kind_name(s.b)));
  }
  // With B the zero kind, cum_trace is the integral of tr A alone, so the
  // exponent machinery is shared with the general identity.
  const std::size_t m = traj.times.size();
  std::vector<double> integrand(m);
  for (std::size_t j = 0; j < m; ++j) {
    integrand[j] = replaced_det_sum(traj.x_samples[j], eval_coeff(s.f, traj.times[j]),
                                    ReplaceAxis::Rows);
  }
  return integral_identity(traj, integrand);
}

DetSeries eq6_det(const Scenario& s, const Trajectory& traj) {
  const std::size_t m = traj.times.size();
  const double det0 = traj.det_direct[0];
  if (det0 == 0.0) {
    throw SingularStart("eq6_det requires det(X0) != 0");
  }

  std::size_t covered = m;
  for (std::size_t j = 0; j < m; ++j) {
    if (!is_invertible(traj.x_samples[j])) {
      covered = j;
      break;
    }
  }

  std::vector<double> psi(covered);
  for (std::size_t j = 0; j < covered; ++j) {
    const double t_j = traj.times[j];
    const Matrix a = eval_coeff(s.a, t_j);
    const Matrix b = eval_coeff(s.b, t_j);
    psi[j] = trace_of_product(inverse(traj.x_samples[j]), eval_coeff(s.f, t_j)) -
             (trace(a) + trace(b));
  }
  const std::vector<double> expo =
      cumulative_quadrature(prefix(traj.times, covered), psi);

  DetSeries out;
  out.values.assign(m, 0.0);
  out.status.assign(m, PointStatus::NotCovered);
  const double log_d0 = std::log(std::fabs(det0));
  for (std::size_t k = 0; k < covered; ++k) {
    if (log_d0 + expo[k] > kExpGuard) {
      out.status[k] = PointStatus::Overflow;
    } else {
      // det0 carries the sign, so the channel preserves it everywhere
      out.values[k] = det0 * std::exp(expo[k]);
      out.status[k] = PointStatus::Ok;
    }
  }
  if (covered < m) out.first_noninvertible_time = traj.times[covered];
  return out;
}

IdentityBundle evaluate_identities(const Scenario& s, const Trajectory& traj) {
  IdentityBundle bundle;
  bundle.eq5 = eq5_det(s, traj);
  if (is_zero_kind(s.f)) bundle.eq2 = eq2_det(s, traj);
  if (is_zero_kind(s.b)) bundle.eq4 = eq4_det(s, traj);
  if (traj.det_direct[0] != 0.0) bundle.eq6 = eq6_det(s, traj);
  return bundle;
}

DriftReport drift_report_from(const IdentityBundle& bundle, const Scenario&,
                              const Trajectory& traj) {
  DriftReport r;
  r.grid_points = traj.times.size();
  r.step_stats = traj.step_stats;
  r.terminal_det_direct = traj.det_direct.back();
  r.terminal_det_ode = traj.det_ode.back();

  const ChannelDrift eq5 = drift_of(bundle.eq5, traj);
  r.max_rel_drift_eq5 = eq5.max_drift.value_or(0.0);
  r.terminal_eq5 = eq5.terminal;

  double worst_detode = 0.0;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    if (!std::isfinite(traj.det_ode[k]) || !std::isfinite(traj.det_direct[k])) continue;
    worst_detode = std::max(worst_detode, rel_drift(traj.det_ode[k], traj.det_direct[k]));
  }
  r.max_rel_drift_detode = worst_detode;

  if (bundle.eq2) {
    const ChannelDrift c = drift_of(*bundle.eq2, traj);
    r.max_rel_drift_eq2 = c.max_drift.value_or(0.0);
    r.terminal_eq2 = c.terminal;
  }
  if (bundle.eq4) {
    const ChannelDrift c = drift_of(*bundle.eq4, traj);
    r.max_rel_drift_eq4 = c.max_drift.value_or(0.0);
    r.terminal_eq4 = c.terminal;
  }
  if (bundle.eq6) {
    const ChannelDrift c = drift_of(*bundle.eq6, traj);
    r.max_rel_drift_eq6 = c.max_drift;
    r.terminal_eq6 = c.terminal;
    r.first_noninvertible_time = bundle.eq6->first_noninvertible_time;
  } else {
    // det(X0) = 0: the inverse-trace channel never applies
    r.first_noninvertible_time = traj.times.front();
  }
  return r;
}

DriftReport drift_report(const Scenario& s, const Trajectory& traj) {
  return drift_report_from(evaluate_identities(s, traj), s, traj);
}

}  // namespace detflow
