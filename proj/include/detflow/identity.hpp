#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "detflow/coeffs.hpp"
#include "detflow/ode.hpp"

namespace detflow {

// Per-grid-point status of an identity channel. Overflow means the log-space
// exponent passed the e^700 guard (or the value otherwise left the finite
// range); NotCovered marks points past the first non-invertible sample of the
// inverse-trace channel.
enum class PointStatus : unsigned char { Ok, Overflow, NotCovered };

struct DetSeries {
  std::vector<double> values;  // meaningful only where status is Ok
  std::vector<PointStatus> status;
  std::optional<double> first_noninvertible_time;  // inverse-trace channel only

  std::size_t size() const { return values.size(); }
  bool ok(std::size_t k) const { return status[k] == PointStatus::Ok; }
};

// Cumulative quadrature of samples g on the grid t (Q[0] = 0). The dispatcher
// picks composite Simpson on uniform grids with an even interval count and
// falls back to composite trapezoid otherwise; interior odd points of the
// Simpson form use the three-point quadratic half-panel, so even points match
// plain composite Simpson exactly.
std::vector<double> cumulative_trapezoid(const std::vector<double>& t,
                                         const std::vector<double>& g);
std::vector<double> cumulative_simpson(const std::vector<double>& t,
                                       const std::vector<double>& g);
bool is_uniform_grid(const std::vector<double>& t);
std::vector<double> cumulative_quadrature(const std::vector<double>& t,
                                          const std::vector<double>& g);

// Homogeneous closed form det(X0) * exp(-cum_trace). Requires F to be the
// zero kind; throws NotHomogeneous otherwise.
DetSeries eq2_det(const Scenario& s, const Trajectory& traj);

// Left-coefficient-only integral identity: the integrating-factor form with
// the replacement-determinant sum as integrand. Requires B to be the zero
// kind; throws NotLeftOnly otherwise.
DetSeries eq4_det(const Scenario& s, const Trajectory& traj);

// General integral identity:
//   exp(-cum_trace[k]) * ( integral of tr[adj(X)F] e^{cum_trace} + det(X0) ).
// Valid through determinant zero crossings.
DetSeries eq5_det(const Scenario& s, const Trajectory& traj);

// Inverse-trace exponential form, gated per sample on is_invertible; stops at
// the first non-invertible sample and records its time. Throws SingularStart
// when det(X0) = 0.
DetSeries eq6_det(const Scenario& s, const Trajectory& traj);

struct DriftReport {
  double max_rel_drift_eq5 = 0.0;
  double max_rel_drift_detode = 0.0;
  std::optional<double> max_rel_drift_eq2;  // present when F is the zero kind
  std::optional<double> max_rel_drift_eq4;  // present when B is the zero kind
  // Present when the inverse-trace channel has at least one valid point;
  // absent together with first_noninvertible_time = t0 means inapplicable
  // from the start.
  std::optional<double> max_rel_drift_eq6;
  std::optional<double> first_noninvertible_time;

  double terminal_det_direct = 0.0;
  double terminal_det_ode = 0.0;
  std::optional<double> terminal_eq5;  // absent when the terminal point overflowed
  std::optional<double> terminal_eq2;
  std::optional<double> terminal_eq4;
  std::optional<double> terminal_eq6;

  std::size_t grid_points = 0;
  StepStats step_stats;
};

// All applicable identity series for one trajectory. eq2/eq4 are present only
// for zero-kind F/B; eq6 only when det(X0) != 0.
struct IdentityBundle {
  DetSeries eq5;
  std::optional<DetSeries> eq2;
  std::optional<DetSeries> eq4;
  std::optional<DetSeries> eq6;
};

IdentityBundle evaluate_identities(const Scenario& s, const Trajectory& traj);

DriftReport drift_report_from(const IdentityBundle& bundle, const Scenario& s,
                              const Trajectory& traj);
DriftReport drift_report(const Scenario& s, const Trajectory& traj);

// Relative drift of one channel value against the direct determinant, with
// the max(1, |det|) denominator used everywhere in this project.
inline double rel_drift(double channel, double det_direct) {
  const double diff = channel > det_direct ? channel - det_direct : det_direct - channel;
  const double mag = det_direct < 0 ? -det_direct : det_direct;
  return diff / (mag > 1.0 ? mag : 1.0);
}

}  // namespace detflow
