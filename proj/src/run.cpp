#include "detflow/run.hpp"

#include <charconv>
#include <cmath>

#include "detflow/errors.hpp"
#include "detflow/identity.hpp"
#include "detflow/ode.hpp"

namespace detflow {

namespace {

constexpr const char* kOverflowMarker = "overflow";

// Missing channels stay empty; non-finite numbers render as the overflow
// marker so the CSV never carries "inf"/"nan" tokens.
std::string numeric_cell(double v) {
  return std::isfinite(v) ? format_double(v) : std::string(kOverflowMarker);
}

std::string series_cell(const DetSeries& series, std::size_t k) {
  switch (series.status[k]) {
    case PointStatus::Ok:
      return numeric_cell(series.values[k]);
    case PointStatus::Overflow:
      return kOverflowMarker;
    case PointStatus::NotCovered:
      return "";
  }
  return "";
}

std::string drift_cell(const DetSeries& series, std::size_t k, double det_direct) {
  if (!series.ok(k) || !std::isfinite(det_direct)) return "";
  return format_double(rel_drift(series.values[k], det_direct));
}

void summary_line(std::ostream& out, const char* key, const std::string& value) {
  out << "# " << key << "=" << value << "\n";
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

int run(const Scenario& s, std::ostream& out, std::ostream& err, const RunOptions& opt) {
  Trajectory traj;
  try {
    traj = integrate(s);
  } catch (const StepSizeUnderflow& e) {
    err << "error kind=StepSizeUnderflow msg=\"" << e.what() << "\"\n";
    return 2;
  } catch (const NonFiniteState& e) {
    err << "error kind=NonFiniteState msg=\"" << e.what() << "\"\n";
    return 2;
  } catch (const Error& e) {
    err << "error kind=IntegrationError msg=\"" << e.what() << "\"\n";
    return 2;
  }

  const IdentityBundle bundle = evaluate_identities(s, traj);
  const DriftReport report = drift_report_from(bundle, s, traj);

  out << "t,det_direct,det_ode,eq5,eq6,eq2,eq4,drift_eq5,drift_eq6\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out << format_double(traj.times[k]) << ',' << numeric_cell(traj.det_direct[k]) << ','
        << numeric_cell(traj.det_ode[k]) << ',' << series_cell(bundle.eq5, k) << ','
        << (bundle.eq6 ? series_cell(*bundle.eq6, k) : "") << ','
        << (bundle.eq2 ? series_cell(*bundle.eq2, k) : "") << ','
        << (bundle.eq4 ? series_cell(*bundle.eq4, k) : "") << ','
        << drift_cell(bundle.eq5, k, traj.det_direct[k]) << ','
        << (bundle.eq6 ? drift_cell(*bundle.eq6, k, traj.det_direct[k]) : "") << "\n";
  }

  summary_line(out, "grid_points", std::to_string(report.grid_points));
  summary_line(out, "steps_accepted", std::to_string(report.step_stats.accepted));
  summary_line(out, "steps_rejected", std::to_string(report.step_stats.rejected));
  summary_line(out, "max_rel_drift_eq5", format_double(report.max_rel_drift_eq5));
  summary_line(out, "max_rel_drift_detode", format_double(report.max_rel_drift_detode));
  if (report.max_rel_drift_eq2) {
    summary_line(out, "max_rel_drift_eq2", format_double(*report.max_rel_drift_eq2));
  }
  if (report.max_rel_drift_eq4) {
    summary_line(out, "max_rel_drift_eq4", format_double(*report.max_rel_drift_eq4));
  }
  if (report.max_rel_drift_eq6) {
    summary_line(out, "max_rel_drift_eq6", format_double(*report.max_rel_drift_eq6));
  } else {
    summary_line(out, "max_rel_drift_eq6",
                 "inapplicable from time " +
                     format_double(report.first_noninvertible_time.value_or(s.t0)));
  }
  if (report.first_noninvertible_time) {
    summary_line(out, "first_noninvertible_time",
                 format_double(*report.first_noninvertible_time));
  }
  summary_line(out, "terminal_det_direct", numeric_cell(report.terminal_det_direct));
  summary_line(out, "terminal_det_ode", numeric_cell(report.terminal_det_ode));
  summary_line(out, "terminal_eq5",
               report.terminal_eq5 ? format_double(*report.terminal_eq5) : kOverflowMarker);
  if (bundle.eq2) {
    summary_line(out, "terminal_eq2",
                 report.terminal_eq2 ? format_double(*report.terminal_eq2) : kOverflowMarker);
  }
  if (bundle.eq4) {
    summary_line(out, "terminal_eq4",
                 report.terminal_eq4 ? format_double(*report.terminal_eq4) : kOverflowMarker);
  }
  if (bundle.eq6 && report.terminal_eq6) {
    summary_line(out, "terminal_eq6", format_double(*report.terminal_eq6));
  }

  if (opt.fail_threshold) {
    double worst = std::max(report.max_rel_drift_eq5, report.max_rel_drift_detode);
    if (report.max_rel_drift_eq2) worst = std::max(worst, *report.max_rel_drift_eq2);
    if (report.max_rel_drift_eq4) worst = std::max(worst, *report.max_rel_drift_eq4);
    if (report.max_rel_drift_eq6) worst = std::max(worst, *report.max_rel_drift_eq6);
    if (worst > *opt.fail_threshold) {
      err << "error kind=DriftThreshold msg=\"max drift " << format_double(worst)
          << " exceeds threshold " << format_double(*opt.fail_threshold) << "\"\n";
      return 3;
    }
  }
  return 0;
}

}  // namespace detflow
