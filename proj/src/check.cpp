#include "detflow/check.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <utility>

#include "detflow/errors.hpp"
#include "detflow/identity.hpp"

namespace detflow {

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

// Distinct, stable stream per property so reordering suites never shifts the
// cases a given property sees.
std::uint64_t salted(std::uint64_t seed, std::uint64_t k) {
  return seed ^ (0x9E3779B97F4A7C15ULL * (k + 1));
}

class PropertyLog {
 public:
  PropertyLog(std::string name, std::ostream& log) : log_(log) { out_.name = std::move(name); }

  void check(bool ok, const std::function<std::string()>& detail) {
    ++out_.cases;
    if (ok) return;
    ++out_.failures;
    if (out_.failures <= 5) {
      log_ << "FAIL [" << out_.name << "] " << detail() << "\n";
    } else if (out_.failures == 6) {
      log_ << "FAIL [" << out_.name << "] further failures suppressed\n";
    }
  }

  SuiteOutcome done() {
    log_ << "[" << out_.name << "] cases=" << out_.cases
         << " failures=" << out_.failures << "\n";
    return out_;
  }

 private:
  std::ostream& log_;
  SuiteOutcome out_;
};

std::string scenario_brief(const Scenario& s, int index) {
  std::ostringstream os;
  os << "scenario#" << index << " n=" << s.n << " a=" << kind_name(s.a)
     << " b=" << kind_name(s.b) << " f=" << kind_name(s.f)
     << " t=[" << s.t0 << "," << s.t_end << "] h=" << s.solver.h;
  return os.str();
}

CoefficientSpec random_sinusoidal(Rng& rng, int n, double amp, double w_lo, double w_hi) {
  SinusoidalCoeff c{random_matrix(rng, n, -amp, amp), random_matrix(rng, n, -amp, amp),
                    rng.uniform(w_lo, w_hi), rng.uniform(0.0, kTwoPi)};
  return c;
}

// coeffs[k] scales t^k; amplitudes halve per degree to keep values O(amp) on
// unit horizons.
CoefficientSpec random_polynomial(Rng& rng, int n, int degree, double amp) {
  PolynomialCoeff p;
  double a = amp;
  for (int k = 0; k <= degree; ++k) {
    p.coeffs.push_back(random_matrix(rng, n, -a, a));
    a *= 0.5;
  }
  return p;
}

}  // namespace

Matrix random_matrix(Rng& rng, int n, double lo, double hi) {
  Matrix m(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = rng.uniform(lo, hi);
  return m;
}

SmoothScenarioOptions smooth_default_options() { return SmoothScenarioOptions{}; }

SmoothScenarioOptions smooth_homogeneous_options() {
  SmoothScenarioOptions o;
  o.zero_f = true;
  o.coeff_amp = 0.5;
  o.omega_min = 2.0;
  o.omega_max = 4.0;
  return o;
}

SmoothScenarioOptions smooth_left_only_options() {
  SmoothScenarioOptions o;
  o.zero_b = true;
  return o;
}

SmoothScenarioOptions smooth_gentle_options() {
  // Kept deliberately low-curvature: the central-difference Jacobi check at
  // h = 1e-3 carries an O(h^2) truncation term scaled by the third derivative
  // of det X(t).
  SmoothScenarioOptions o;
  o.n_max = 3;
  o.coeff_amp = 0.3;
  o.omega_min = 0.8;
  o.omega_max = 1.6;
  o.forcing_amp = 0.3;
  o.x0_spread = 0.15;
  return o;
}

SmoothScenarioOptions smooth_invertible_options() {
  SmoothScenarioOptions o;
  o.n_max = 4;
  o.coeff_amp = 0.35;
  o.omega_min = 1.0;
  o.omega_max = 3.0;
  o.forcing_amp = 0.3;
  o.x0_spread = 0.1;
  return o;
}

Scenario random_smooth_scenario(Rng& rng, const SmoothScenarioOptions& o) {
  Scenario s;
  s.n = rng.uniform_int(o.n_min, o.n_max);
  s.t0 = o.t0;
  s.t_end = o.t_end;
  Matrix x0 = Matrix::identity(s.n);
  for (int i = 0; i < s.n; ++i)
    for (int j = 0; j < s.n; ++j) x0(i, j) += rng.uniform(-o.x0_spread, o.x0_spread);
  s.x0 = x0;
  s.a = random_sinusoidal(rng, s.n, o.coeff_amp, o.omega_min, o.omega_max);
  s.b = o.zero_b ? CoefficientSpec{ZeroCoeff{s.n}}
                 : random_polynomial(rng, s.n, 2, o.coeff_amp);
  if (o.zero_f) {
    s.f = ZeroCoeff{s.n};
  } else if (rng.unit() < 0.5) {
    s.f = random_sinusoidal(rng, s.n, o.forcing_amp, o.omega_min, o.omega_max);
  } else {
    s.f = random_polynomial(rng, s.n, 3, o.forcing_amp);
  }
  s.solver = SolverConfig{SolveMethod::Rk4Fixed, o.h, 1e-8};
  return s;
}

std::pair<Scenario, Trajectory> draw_invertible_scenario(Rng& rng) {
  const SmoothScenarioOptions o = smooth_invertible_options();
  for (int attempt = 0; attempt < 200; ++attempt) {
    Scenario s = random_smooth_scenario(rng, o);
    Trajectory traj = integrate(s);
    double min_abs = std::abs(traj.det_direct[0]);
    for (double d : traj.det_direct) min_abs = std::min(min_abs, std::abs(d));
    if (min_abs >= 0.1) return {std::move(s), std::move(traj)};
  }
  throw Error("draw_invertible_scenario: no invertible-throughout draw in 200 attempts");
}

Scenario scalar_decay_scenario(double h) {
  Scenario s;
  s.n = 1;
  s.t0 = 0.0;
  s.t_end = 1.0;
  s.x0 = Matrix(1, {2.0});
  s.a = ConstantCoeff{Matrix(1, {0.3})};
  s.b = ConstantCoeff{Matrix(1, {0.7})};
  s.f = ZeroCoeff{1};
  s.solver = SolverConfig{SolveMethod::Rk4Fixed, h, 1e-8};
  return s;
}

Scenario nilpotent_scenario(double h) {
  Scenario s;
  s.n = 2;
  s.t0 = 0.0;
  s.t_end = 2.0;
  s.x0 = Matrix::identity(2);
  s.a = ZeroCoeff{2};
  s.b = ZeroCoeff{2};
  s.f = ConstantCoeff{Matrix(2, {0.0, 1.0, 0.0, 0.0})};
  s.solver = SolverConfig{SolveMethod::Rk4Fixed, h, 1e-8};
  return s;
}

Scenario diagonal_homogeneous_scenario(double h, double t_end) {
  Scenario s;
  s.n = 2;
  s.t0 = 0.0;
  s.t_end = t_end;
  s.x0 = Matrix::identity(2);
  s.a = ConstantCoeff{Matrix(2, {1.0, 0.0, 0.0, 2.0})};
  s.b = ConstantCoeff{Matrix(2, {3.0, 0.0, 0.0, 4.0})};
  s.f = ZeroCoeff{2};
  s.solver = SolverConfig{SolveMethod::Rk4Fixed, h, 1e-8};
  return s;
}

Scenario sign_crossing_scenario(double h) {
  Scenario s;
  s.n = 1;
  s.t0 = 0.0;
  s.t_end = 2.0;
  s.x0 = Matrix(1, {-1.0});
  s.a = ZeroCoeff{1};
  s.b = ZeroCoeff{1};
  s.f = ConstantCoeff{Matrix(1, {1.0})};
  s.solver = SolverConfig{SolveMethod::Rk4Fixed, h, 1e-8};
  return s;
}

// --- linalg suite ---------------------------------------------------------

std::vector<SuiteOutcome> check_linalg(std::uint64_t seed, std::ostream& log,
                                       const CheckHooks& hooks) {
  const auto adj = hooks.adjugate_impl
                       ? hooks.adjugate_impl
                       : std::function<Matrix(const Matrix&)>(
                             [](const Matrix& m) { return adjugate(m); });
  std::vector<SuiteOutcome> out;

  {
    PropertyLog p("linalg/adjugate-identity", log);
    Rng rng(salted(seed, 1));
    for (int c = 0; c < 1000; ++c) {
      const int n = rng.uniform_int(1, 6);
      const Matrix x = random_matrix(rng, n, -1.0, 1.0);
      const double d = det(x);
      const Matrix ax = adj(x);
      const Matrix want = mat_scale(d, Matrix::identity(n));
      const double rl = max_abs(mat_sub(mat_mul(x, ax), want));
      const double rr = max_abs(mat_sub(mat_mul(ax, x), want));
      const double tol = 1e-10 * std::max(1.0, std::pow(max_abs(x), n));
      p.check(rl <= tol && rr <= tol, [&] {
        std::ostringstream os;
        os << "X*adj(X) != det(X)*I: case " << c << " n=" << n << " residuals=(" << rl
           << "," << rr << ") tol=" << tol << " X=" << to_string(x);
        return os.str();
      });
    }
    out.push_back(p.done());
  }

  {
    PropertyLog p("linalg/replacement-sum", log);
    Rng rng(salted(seed, 2));
    for (int c = 0; c < 1000; ++c) {
      const int n = rng.uniform_int(2, 5);
      const Matrix x = random_matrix(rng, n, -1.0, 1.0);
      const Matrix f = random_matrix(rng, n, -1.0, 1.0);
      const double rows = replaced_det_sum(x, f, ReplaceAxis::Rows);
      const double cols = replaced_det_sum(x, f, ReplaceAxis::Columns);
      const double tr = trace_of_product(adj(x), f);
      const double tol = 1e-11 * std::max(1.0, std::abs(tr));
      p.check(std::abs(rows - cols) <= tol && std::abs(rows - tr) <= tol, [&] {
        std::ostringstream os;
        os << "replaced-determinant sum != tr(adj(X)F): case " << c << " n=" << n
           << " rows=" << rows << " cols=" << cols << " trace=" << tr
           << " X=" << to_string(x) << " F=" << to_string(f);
        return os.str();
      });
    }
    out.push_back(p.done());
  }

  {
    PropertyLog p("linalg/trace-cyclic", log);
    Rng rng(salted(seed, 3));
    for (int c = 0; c < 500; ++c) {
      const int n = rng.uniform_int(1, 6);
      const Matrix x = random_matrix(rng, n, -2.0, 2.0);
      const Matrix y = random_matrix(rng, n, -2.0, 2.0);
      const double xy = trace(mat_mul(x, y));
      const double yx = trace(mat_mul(y, x));
      const double tol = 1e-12 * std::max(1.0, std::abs(xy));
      p.check(std::abs(xy - yx) <= tol, [&] {
        std::ostringstream os;
        os << "tr(XY) != tr(YX): case " << c << " n=" << n << " tr(XY)=" << xy
           << " tr(YX)=" << yx << " X=" << to_string(x) << " Y=" << to_string(y);
        return os.str();
      });
    }
    out.push_back(p.done());
  }

  {
    PropertyLog p("linalg/trace-linear", log);
    Rng rng(salted(seed, 4));
    for (int c = 0; c < 500; ++c) {
      const int n = rng.uniform_int(1, 6);
      const Matrix x = random_matrix(rng, n, -2.0, 2.0);
      const Matrix y = random_matrix(rng, n, -2.0, 2.0);
      const double lam = rng.uniform(-3.0, 3.0);
      const double mu = rng.uniform(-3.0, 3.0);
      const double lhs = trace(mat_add(mat_scale(lam, x), mat_scale(mu, y)));
      const double rhs_v = lam * trace(x) + mu * trace(y);
      const double tol = 1e-12 * std::max(1.0, std::abs(rhs_v));
      p.check(std::abs(lhs - rhs_v) <= tol, [&] {
        std::ostringstream os;
        os << "trace not linear: case " << c << " n=" << n << " lambda=" << lam
           << " mu=" << mu << " lhs=" << lhs << " rhs=" << rhs_v;
        return os.str();
      });
    }
    out.push_back(p.done());
  }

  {
    PropertyLog p("linalg/duplicate-row-det", log);
    Rng rng(salted(seed, 5));
    for (int c = 0; c < 200; ++c) {
      const int n = rng.uniform_int(2, 6);
      Matrix x = random_matrix(rng, n, -1.0, 1.0);
      const int src = rng.uniform_int(0, n - 1);
      int dst = rng.uniform_int(0, n - 2);
      if (dst >= src) ++dst;
      for (int j = 0; j < n; ++j) x(dst, j) = x(src, j);
      const double d = det(x);
      p.check(d == 0.0, [&] {
        std::ostringstream os;
        os << "duplicate-row determinant not exactly zero: case " << c << " n=" << n
           << " det=" << d << " X=" << to_string(x);
        return os.str();
      });
    }
    out.push_back(p.done());
  }

  {
    PropertyLog p("linalg/matmul-associativity", log);
    Rng rng(salted(seed, 6));
    for (int c = 0; c < 200; ++c) {
      const Matrix a = random_matrix(rng, 3, -1.0, 1.0);
      const Matrix b = random_matrix(rng, 3, -1.0, 1.0);
      const Matrix cm = random_matrix(rng, 3, -1.0, 1.0);
      const double r = max_abs(mat_sub(mat_mul(mat_mul(a, b), cm), mat_mul(a, mat_mul(b, cm))));
      p.check(r <= 1e-13, [&] {
        std::ostringstream os;
        os << "(AB)C != A(BC): case " << c << " residual=" << r << " A=" << to_string(a)
           << " B=" << to_string(b) << " C=" << to_string(cm);
        return os.str();
      });
    }
    out.push_back(p.done());
  }

  return out;
}

// --- identities suite -----------------------------------------------------

std::vector<SuiteOutcome> check_identities(std::uint64_t seed, std::ostream& log) {
  std::vector<SuiteOutcome> out;

  {
    PropertyLog p5("identities/eq5-drift", log);
    PropertyLog pd("identities/detode-drift", log);
    PropertyLog p0("identities/eq5-initial-exact", log);
    Rng rng(salted(seed, 11));
    for (int c = 0; c < 12; ++c) {
      const Scenario s = random_smooth_scenario(rng, smooth_default_options());
      const Trajectory traj = integrate(s);
      const IdentityBundle bundle = evaluate_identities(s, traj);
      const DriftReport r = drift_report_from(bundle, s, traj);
      p5.check(r.max_rel_drift_eq5 <= 1e-6, [&] {
        std::ostringstream os;
        os << scenario_brief(s, c) << " max_rel_drift_eq5=" << r.max_rel_drift_eq5;
        return os.str();
      });
      pd.check(r.max_rel_drift_detode <= 1e-6, [&] {
        std::ostringstream os;
        os << scenario_brief(s, c) << " max_rel_drift_detode=" << r.max_rel_drift_detode;
        return os.str();
      });
      p0.check(bundle.eq5.ok(0) && bundle.eq5.values[0] == traj.det_direct[0], [&] {
        std::ostringstream os;
        os << scenario_brief(s, c) << " eq5[0]=" << bundle.eq5.values[0]
           << " det(X0)=" << traj.det_direct[0];
        return os.str();
      });
    }
    out.push_back(p5.done());
    out.push_back(pd.done());
    out.push_back(p0.done());
  }

  {
    PropertyLog p("identities/eq4-eq5-coincidence", log);
    Rng rng(salted(seed, 12));
    for (int c = 0; c < 6; ++c) {
      const Scenario s = random_smooth_scenario(rng, smooth_left_only_options());
      const Trajectory traj = integrate(s);
      const IdentityBundle bundle = evaluate_identities(s, traj);
      double worst = 0.0;
      std::size_t worst_k = 0;
      for (std::size_t k = 0; k < bundle.eq5.size(); ++k) {
        if (!bundle.eq5.ok(k) || !bundle.eq4->ok(k)) continue;
        const double diff = std::abs(bundle.eq4->values[k] - bundle.eq5.values[k]) /
                            std::max(1.0, std::abs(traj.det_direct[k]));
        if (diff > worst) {
          worst = diff;
          worst_k = k;
        }
      }
      p.check(bundle.eq4.has_value() && worst <= 1e-11, [&] {
        std::ostringstream os;
        os << scenario_brief(s, c) << " max|eq4-eq5|=" << worst << " at t="
           << traj.times[worst_k];
        return os.str();
      });
    }
    out.push_back(p.done());
  }

  {
    PropertyLog p("identities/eq2-eq5-reduction", log);
    Rng rng(salted(seed, 13));
    for (int c = 0; c < 6; ++c) {
      const Scenario s = random_smooth_scenario(rng, smooth_homogeneous_options());
      const Trajectory traj = integrate(s);
      const IdentityBundle bundle = evaluate_identities(s, traj);
      double worst = 0.0;
      for (std::size_t k = 0; k < bundle.eq5.size(); ++k) {
        if (!bundle.eq5.ok(k) || !bundle.eq2->ok(k)) continue;
        worst = std::max(worst, std::abs(bundle.eq2->values[k] - bundle.eq5.values[k]) /
                                    std::max(1.0, std::abs(traj.det_direct[k])));
      }
      p.check(bundle.eq2.has_value() && worst <= 1e-12, [&] {
        std::ostringstream os;
        os << scenario_brief(s, c) << " max|eq2-eq5|=" << worst;
        return os.str();
      });
    }
    out.push_back(p.done());
  }

  {
    PropertyLog p("identities/eq6-eq5-agreement", log);
    PropertyLog ps("identities/eq6-sign-preservation", log);
    Rng rng(salted(seed, 14));
    for (int c = 0; c < 6; ++c) {
      const auto [s, traj] = draw_invertible_scenario(rng);
      const IdentityBundle bundle = evaluate_identities(s, traj);
      const double sign0 = traj.det_direct[0] > 0.0 ? 1.0 : -1.0;
      double worst = 0.0;
      bool all_ok = bundle.eq6.has_value();
      bool signs_ok = all_ok;
      if (bundle.eq6.has_value()) {
        for (std::size_t k = 0; k < bundle.eq6->size(); ++k) {
          if (!bundle.eq6->ok(k)) {
            all_ok = false;
            continue;
          }
          worst = std::max(worst, std::abs(bundle.eq6->values[k] - bundle.eq5.values[k]) /
                                      std::max(1.0, std::abs(traj.det_direct[k])));
          if (bundle.eq6->values[k] * sign0 <= 0.0) signs_ok = false;
        }
      }
      p.check(all_ok && worst <= 1e-7, [&] {
        std::ostringstream os;
        os << scenario_brief(s, c) << " max|eq6-eq5|=" << worst
           << (all_ok ? "" : " (channel not valid on the whole grid)");
        return os.str();
      });
      ps.check(signs_ok, [&] {
        std::ostringstream os;
        os << scenario_brief(s, c) << " eq6 sign flipped; det(X0)=" << traj.det_direct[0];
        return os.str();
      });
    }
    out.push_back(p.done());
    out.push_back(ps.done());
  }

  {
    PropertyLog p("identities/cumtrace-quadrature", log);
    Rng rng(salted(seed, 15));
    for (int c = 0; c < 4; ++c) {
      const Scenario s = random_smooth_scenario(rng, smooth_default_options());
      const Trajectory traj = integrate(s);
      std::vector<double> g(traj.times.size());
      for (std::size_t k = 0; k < traj.times.size(); ++k) {
        g[k] = trace(eval_coeff(s.a, traj.times[k])) + trace(eval_coeff(s.b, traj.times[k]));
      }
      const std::vector<double> q = cumulative_quadrature(traj.times, g);
      double worst = 0.0;
      for (std::size_t k = 0; k < q.size(); ++k)
        worst = std::max(worst, std::abs(traj.cum_trace[k] - q[k]));
      p.check(worst <= 1e-9, [&] {
        std::ostringstream os;
        os << scenario_brief(s, c) << " max|cum_trace - quadrature|=" << worst;
        return os.str();
      });
    }
    out.push_back(p.done());
  }

  {
    PropertyLog p("identities/jacobi-central-difference", log);
    Rng rng(salted(seed, 16));
    for (int c = 0; c < 4; ++c) {
      const Scenario s = random_smooth_scenario(rng, smooth_gentle_options());
      const Trajectory traj = integrate(s);
      double worst = 0.0;
      double worst_t = s.t0;
      for (std::size_t k = 1; k + 1 < traj.times.size(); ++k) {
        const double fd = (traj.det_direct[k + 1] - traj.det_direct[k - 1]) /
                          (traj.times[k + 1] - traj.times[k - 1]);
        const double an =
            trace_of_product(adjugate(traj.x_samples[k]), rhs(traj.times[k], traj.x_samples[k], s));
        const double rel = std::abs(fd - an) / std::max(1.0, std::abs(an));
        if (rel > worst) {
          worst = rel;
          worst_t = traj.times[k];
        }
      }
      p.check(worst <= 1e-5, [&] {
        std::ostringstream os;
        os << scenario_brief(s, c) << " max FD-vs-tr(adj(X) L[X]) rel error=" << worst
           << " at t=" << worst_t;
        return os.str();
      });
    }
    out.push_back(p.done());
  }

  {
    PropertyLog p("identities/analytic-pins", log);
    {
      const Scenario s = nilpotent_scenario(1e-3);
      const DriftReport r = drift_report(s, integrate(s));
      double worst = std::max(r.max_rel_drift_eq5, r.max_rel_drift_detode);
      if (r.max_rel_drift_eq4) worst = std::max(worst, *r.max_rel_drift_eq4);
      if (r.max_rel_drift_eq6) worst = std::max(worst, *r.max_rel_drift_eq6);
      p.check(worst <= 1e-10, [&] {
        std::ostringstream os;
        os << "nilpotent forcing: max channel drift=" << worst;
        return os.str();
      });
    }
    {
      const Scenario s = scalar_decay_scenario(1e-3);
      const Trajectory traj = integrate(s);
      const double got = traj.x_samples.back()(0, 0);
      const double want = 2.0 * std::exp(-1.0);
      p.check(std::abs(got - want) <= 1e-9, [&] {
        std::ostringstream os;
        os << "scalar decay: X(1)=" << got << " want 2e^-1=" << want;
        return os.str();
      });
    }
    {
      const Scenario s = diagonal_homogeneous_scenario(1e-3, 0.2);
      const Trajectory traj = integrate(s);
      const double got = traj.det_direct.back();
      const double want = std::exp(-2.0);
      p.check(std::abs(got - want) <= 1e-8, [&] {
        std::ostringstream os;
        os << "diagonal homogeneous: det X(0.2)=" << got << " want e^-2=" << want;
        return os.str();
      });
    }
    {
      const Scenario s = sign_crossing_scenario(1e-3);
      const Trajectory traj = integrate(s);
      const IdentityBundle bundle = evaluate_identities(s, traj);
      const DriftReport r = drift_report_from(bundle, s, traj);
      const bool fnt_ok = r.first_noninvertible_time.has_value() &&
                          std::abs(*r.first_noninvertible_time - 1.0) <= 1.5e-3;
      p.check(r.max_rel_drift_eq5 <= 1e-8 && fnt_ok, [&] {
        std::ostringstream os;
        os << "sign crossing: eq5 drift=" << r.max_rel_drift_eq5 << " first_noninvertible_time=";
        if (r.first_noninvertible_time)
          os << *r.first_noninvertible_time;
        else
          os << "absent";
        return os.str();
      });
    }
    out.push_back(p.done());
  }

  return out;
}

// --- convergence suite ----------------------------------------------------

std::vector<SuiteOutcome> check_convergence(std::uint64_t seed, std::ostream& log) {
  std::vector<SuiteOutcome> out;

  {
    PropertyLog p("convergence/rk4-order", log);
    const Matrix exact(2, {std::exp(-4.0), 0.0, 0.0, std::exp(-6.0)});
    const auto terminal_error = [&](double h) {
      const Trajectory traj = integrate(diagonal_homogeneous_scenario(h, 1.0));
      return max_abs(mat_sub(traj.x_samples.back(), exact));
    };
    for (const double h : {1e-2, 5e-3}) {
      const double eh = terminal_error(h);
      const double eh2 = terminal_error(h / 2.0);
      const double ratio = eh / eh2;
      p.check(ratio >= 12.0 && ratio <= 20.0, [&] {
        std::ostringstream os;
        os << "h=" << h << " err(h)=" << eh << " err(h/2)=" << eh2 << " ratio=" << ratio
           << " outside [12,20]";
        return os.str();
      });
    }
    out.push_back(p.done());
  }

  {
    PropertyLog p("convergence/eq5-refinement", log);
    Rng rng(salted(seed, 21));
    for (int c = 0; c < 4; ++c) {
      Scenario s = random_smooth_scenario(rng, smooth_default_options());
      const DriftReport coarse = drift_report(s, integrate(s));
      s.solver.h /= 2.0;
      const DriftReport fine = drift_report(s, integrate(s));
      const double factor = coarse.max_rel_drift_eq5 /
                            std::max(fine.max_rel_drift_eq5, 1e-300);
      p.check(factor >= 3.5, [&] {
        std::ostringstream os;
        os << scenario_brief(s, c) << " drift(h)=" << coarse.max_rel_drift_eq5
           << " drift(h/2)=" << fine.max_rel_drift_eq5 << " factor=" << factor;
        return os.str();
      });
    }
    out.push_back(p.done());
  }

  {
    PropertyLog p("convergence/residual-halving", log);
    const auto residual_at = [](double h) {
      const Scenario s = diagonal_homogeneous_scenario(h, 1.0);
      return operator_residual(integrate(s), s);
    };
    const double r2 = residual_at(2e-3);
    const double r1 = residual_at(1e-3);
    const double ratio = r2 / r1;
    p.check(ratio >= 2.5 && ratio <= 6.0, [&] {
      std::ostringstream os;
      os << "residual(2e-3)=" << r2 << " residual(1e-3)=" << r1 << " ratio=" << ratio
         << " outside [2.5,6] for the O(h^2) defect";
      return os.str();
    });
    out.push_back(p.done());
  }

  return out;
}

std::vector<SuiteOutcome> run_check(const std::string& suite, std::uint64_t seed,
                                    std::ostream& log, const CheckHooks& hooks) {
  const bool all = suite == "all";
  std::vector<SuiteOutcome> outcomes;
  const auto append = [&](std::vector<SuiteOutcome> v) {
    for (auto& o : v) outcomes.push_back(std::move(o));
  };
  if (all || suite == "linalg") append(check_linalg(seed, log, hooks));
  if (all || suite == "identities") append(check_identities(seed, log));
  if (all || suite == "convergence") append(check_convergence(seed, log));
  if (outcomes.empty()) throw ValidationError({"unknown check suite: " + suite});

  int cases = 0;
  int failures = 0;
  for (const auto& o : outcomes) {
    cases += o.cases;
    failures += o.failures;
  }
  log << "check " << suite << " seed=" << seed << ": properties=" << outcomes.size()
      << " cases=" << cases << " failures=" << failures
      << (failures == 0 ? " PASS" : " FAIL") << "\n";
  return outcomes;
}

int check_exit_code(const std::vector<SuiteOutcome>& outcomes) {
  for (const auto& o : outcomes) {
    if (o.failures > 0) return 1;
  }
  return 0;
}

}  // namespace detflow
