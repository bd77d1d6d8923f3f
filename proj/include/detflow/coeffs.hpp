#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "detflow/matrix.hpp"

namespace detflow {

// Time-varying coefficient kinds. Each payload pins the matrix dimension at
// construction; eval_coeff is a pure function of the coefficient value and t.

struct ZeroCoeff {
  int n;
  bool operator==(const ZeroCoeff&) const = default;
};

struct ConstantCoeff {
  Matrix value;
  bool operator==(const ConstantCoeff&) const = default;
};

// coeffs[k] multiplies t^k; evaluated by Horner's rule.
struct PolynomialCoeff {
  std::vector<Matrix> coeffs;
  bool operator==(const PolynomialCoeff&) const = default;
};

// m0 + m1 * sin(omega * t + phi)
struct SinusoidalCoeff {
  Matrix m0;
  Matrix m1;
  double omega = 1.0;
  double phi = 0.0;
  bool operator==(const SinusoidalCoeff&) const = default;
};

// Piecewise-linear in t between strictly increasing knots. C0 only; fixed-step
// convergence-order tests should prefer the smooth kinds.
struct TabulatedCoeff {
  std::vector<double> times;
  std::vector<Matrix> values;
  bool operator==(const TabulatedCoeff&) const = default;
};

using CoefficientSpec =
    std::variant<ZeroCoeff, ConstantCoeff, PolynomialCoeff, SinusoidalCoeff, TabulatedCoeff>;

int coeff_dim(const CoefficientSpec& c);
bool is_zero_kind(const CoefficientSpec& c);
const char* kind_name(const CoefficientSpec& c);

// Value of the coefficient at time t. Throws OutOfRange for a tabulated t
// outside the knot range (with a relative slop of 1e-12 at the endpoints to
// absorb integrator stage-time rounding).
Matrix eval_coeff(const CoefficientSpec& c, double t);

enum class SolveMethod { Rk4Fixed, Rkf45Adaptive };

struct SolverConfig {
  SolveMethod method = SolveMethod::Rk4Fixed;
  double h = 1e-3;    // fixed step for rk4
  double tol = 1e-8;  // per-step max-norm error bound for rkf45
  bool operator==(const SolverConfig&) const = default;
};

// The full initial-value problem: integrate dX/dt + A(t)X + XB(t) = F(t)
// from x0 over [t0, t_end].
struct Scenario {
  int n = 1;
  double t0 = 0.0;
  double t_end = 1.0;
  Matrix x0{1};
  CoefficientSpec a = ZeroCoeff{1};
  CoefficientSpec b = ZeroCoeff{1};
  CoefficientSpec f = ZeroCoeff{1};
  SolverConfig solver;
  std::optional<std::uint64_t> seed;  // carried for randomized generation; unused by run
};

// All violations, empty when the scenario is well formed.
std::vector<std::string> validate_issues(const Scenario& s);

// Throws ValidationError listing every violation.
void validate(const Scenario& s);

}  // namespace detflow
