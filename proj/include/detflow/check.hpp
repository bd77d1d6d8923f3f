#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "detflow/coeffs.hpp"
#include "detflow/matrix.hpp"
#include "detflow/ode.hpp"
#include "detflow/random.hpp"

namespace detflow {

// Seeded property suites behind `detflow check`. Each suite prints one line
// per property plus the inputs of any failing case, and the whole run is
// deterministic in the seed.

struct SuiteOutcome {
  std::string name;
  int cases = 0;
  int failures = 0;
};

// Injection point used by the suite's own mutation tests: swapping in a
// deliberately broken adjugate must make the linalg suite fail and name the
// violated identity. Production callers leave this empty.
struct CheckHooks {
  std::function<Matrix(const Matrix&)> adjugate_impl;
};

std::vector<SuiteOutcome> check_linalg(std::uint64_t seed, std::ostream& log,
                                       const CheckHooks& hooks = {});
std::vector<SuiteOutcome> check_identities(std::uint64_t seed, std::ostream& log);
std::vector<SuiteOutcome> check_convergence(std::uint64_t seed, std::ostream& log);

// suite: linalg | identities | convergence | all
std::vector<SuiteOutcome> run_check(const std::string& suite, std::uint64_t seed,
                                    std::ostream& log, const CheckHooks& hooks = {});

int check_exit_code(const std::vector<SuiteOutcome>& outcomes);

// --- randomized scenario generation -------------------------------------

Matrix random_matrix(Rng& rng, int n, double lo, double hi);

struct SmoothScenarioOptions {
  int n_min = 2;
  int n_max = 5;
  double t0 = 0.0;
  double t_end = 1.0;
  double h = 1e-3;
  double coeff_amp = 0.55;
  double omega_min = 4.0;
  double omega_max = 8.0;
  double forcing_amp = 0.8;
  double x0_spread = 0.25;
  bool zero_b = false;
  bool zero_f = false;
};

// Presets used by the suites and the acceptance harness.
SmoothScenarioOptions smooth_default_options();      // general drift checks
SmoothScenarioOptions smooth_homogeneous_options();  // F = 0
SmoothScenarioOptions smooth_left_only_options();    // B = 0
SmoothScenarioOptions smooth_gentle_options();       // low-curvature, for FD checks
SmoothScenarioOptions smooth_invertible_options();   // tame, det stays away from 0

// Sinusoidal A, polynomial B (unless zero_b), mixed-kind F (unless zero_f),
// X0 = I plus a uniform perturbation.
Scenario random_smooth_scenario(Rng& rng, const SmoothScenarioOptions& opts);

// Redraws with smooth_invertible_options until min |det_direct| >= 0.1 over
// the whole grid, returning the scenario together with its trajectory.
std::pair<Scenario, Trajectory> draw_invertible_scenario(Rng& rng);

// --- canonical fixtures ---------------------------------------------------

// n=1, a=0.3, b=0.7, f=0, x0=2 on [0,1]; x(t) = 2 e^{-t}.
Scenario scalar_decay_scenario(double h);
// A=B=0, F=[[0,1],[0,0]], X0=I2 on [0,2]; X(t)=[[1,t],[0,1]], det constant 1.
Scenario nilpotent_scenario(double h);
// A=diag(1,2), B=diag(3,4), F=0, X0=I2; X(t)=diag(e^{-4t}, e^{-6t}).
Scenario diagonal_homogeneous_scenario(double h, double t_end = 1.0);
// n=1, a=b=0, f=1, x0=-1 on [0,2]; x(t) = t-1 crosses zero at t=1.
Scenario sign_crossing_scenario(double h);

}  // namespace detflow
