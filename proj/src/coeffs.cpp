#include "detflow/coeffs.hpp"

#include <algorithm>
#include <cmath>

#include "detflow/errors.hpp"

namespace detflow {

namespace {

struct DimVisitor {
  int operator()(const ZeroCoeff& c) const { return c.n; }
  int operator()(const ConstantCoeff& c) const { return c.value.dim(); }
  int operator()(const PolynomialCoeff& c) const {
    return c.coeffs.empty() ? 0 : c.coeffs.front().dim();
  }
  int operator()(const SinusoidalCoeff& c) const { return c.m0.dim(); }
  int operator()(const TabulatedCoeff& c) const {
    return c.values.empty() ? 0 : c.values.front().dim();
  }
};

struct NameVisitor {
  const char* operator()(const ZeroCoeff&) const { return "zero"; }
  const char* operator()(const ConstantCoeff&) const { return "constant"; }
  const char* operator()(const PolynomialCoeff&) const { return "polynomial"; }
  const char* operator()(const SinusoidalCoeff&) const { return "sinusoidal"; }
  const char* operator()(const TabulatedCoeff&) const { return "tabulated"; }
};

Matrix eval_tabulated(const TabulatedCoeff& c, double t) {
  const double lo = c.times.front();
  const double hi = c.times.back();
  const double slop = 1e-12 * (hi - lo);
  if (t < lo - slop || t > hi + slop) {
    throw OutOfRange("tabulated coefficient evaluated at t=" + std::to_string(t) +
                     " outside knot range [" + std::to_string(lo) + ", " +
                     std::to_string(hi) + "]");
  }
  const double tc = std::clamp(t, lo, hi);
  // segment index: largest i with times[i] <= tc, capped at the last segment
  auto it = std::upper_bound(c.times.begin(), c.times.end(), tc);
  std::size_t i = static_cast<std::size_t>(std::distance(c.times.begin(), it));
  i = (i == 0) ? 0 : i - 1;
  if (i + 1 >= c.times.size()) i = c.times.size() - 2;
  const double theta = (tc - c.times[i]) / (c.times[i + 1] - c.times[i]);
  return mat_add(mat_scale(1.0 - theta, c.values[i]), mat_scale(theta, c.values[i + 1]));
}

}  // namespace

int coeff_dim(const CoefficientSpec& c) { return std::visit(DimVisitor{}, c); }

bool is_zero_kind(const CoefficientSpec& c) {
  return std::holds_alternative<ZeroCoeff>(c);
}

const char* kind_name(const CoefficientSpec& c) { return std::visit(NameVisitor{}, c); }

Matrix eval_coeff(const CoefficientSpec& c, double t) {
  if (const auto* z = std::get_if<ZeroCoeff>(&c)) return Matrix::zero(z->n);
  if (const auto* k = std::get_if<ConstantCoeff>(&c)) return k->value;
  if (const auto* p = std::get_if<PolynomialCoeff>(&c)) {
    Matrix acc = p->coeffs.back();
    for (std::size_t k = p->coeffs.size() - 1; k-- > 0;) {
      acc = mat_add(mat_scale(t, acc), p->coeffs[k]);
    }
    return acc;
  }
  if (const auto* s = std::get_if<SinusoidalCoeff>(&c)) {
    return mat_add(s->m0, mat_scale(std::sin(s->omega * t + s->phi), s->m1));
  }
  return eval_tabulated(std::get<TabulatedCoeff>(c), t);
}

std::vector<std::string> validate_issues(const Scenario& s) {
  std::vector<std::string> issues;

  if (s.n < 1 || s.n > 64) {
    issues.push_back("n out of range [1, 64]: " + std::to_string(s.n));
  }
  if (!std::isfinite(s.t0) || !std::isfinite(s.t_end)) {
    issues.push_back("time bounds must be finite");
  } else if (!(s.t_end > s.t0)) {
    issues.push_back("empty interval: t_end must exceed t0");
  }
  if (s.x0.dim() != s.n) {
    issues.push_back("dimension mismatch: x0 is " + std::to_string(s.x0.dim()) + "x" +
                     std::to_string(s.x0.dim()) + " but n=" + std::to_string(s.n));
  }

  auto check_coeff = [&](const CoefficientSpec& c, const char* label) {
    const int d = coeff_dim(c);
    if (d != s.n) {
      issues.push_back("dimension mismatch: coefficient " + std::string(label) + " is " +
                       std::to_string(d) + "x" + std::to_string(d) + " but n=" +
                       std::to_string(s.n));
    }
    if (const auto* p = std::get_if<PolynomialCoeff>(&c)) {
      if (p->coeffs.empty()) {
        issues.push_back(std::string(label) + ": polynomial needs at least one coefficient");
      }
      for (const auto& m : p->coeffs) {
        if (m.dim() != d) {
          issues.push_back(std::string(label) + ": polynomial coefficients differ in dimension");
          break;
        }
      }
    }
    if (const auto* sc = std::get_if<SinusoidalCoeff>(&c)) {
      if (sc->m1.dim() != sc->m0.dim()) {
        issues.push_back(std::string(label) + ": sinusoidal m0/m1 differ in dimension");
      }
      if (!std::isfinite(sc->omega) || !std::isfinite(sc->phi)) {
        issues.push_back(std::string(label) + ": sinusoidal omega/phi must be finite");
      }
    }
    if (const auto* tb = std::get_if<TabulatedCoeff>(&c)) {
      if (tb->times.size() < 2) {
        issues.push_back(std::string(label) + ": tabulated kind needs at least 2 knots");
      } else {
        if (tb->times.size() != tb->values.size()) {
          issues.push_back(std::string(label) + ": tabulated knot/value count mismatch");
        }
        for (std::size_t i = 0; i + 1 < tb->times.size(); ++i) {
          if (!(tb->times[i] < tb->times[i + 1])) {
            issues.push_back(std::string(label) + ": tabulated knots must be strictly increasing");
            break;
          }
        }
        for (const auto& m : tb->values) {
          if (m.dim() != d) {
            issues.push_back(std::string(label) + ": tabulated values differ in dimension");
            break;
          }
        }
        if (std::isfinite(s.t0) && std::isfinite(s.t_end) &&
            (tb->times.front() > s.t0 || tb->times.back() < s.t_end)) {
          issues.push_back(std::string(label) + ": tabulated knots do not cover [t0, t_end]");
        }
      }
    }
  };
  check_coeff(s.a, "a");
  check_coeff(s.b, "b");
  check_coeff(s.f, "f");

  if (s.solver.method == SolveMethod::Rk4Fixed) {
    if (!(std::isfinite(s.solver.h) && s.solver.h > 0.0)) {
      issues.push_back("solver: rk4 step size h must be positive and finite");
    }
  } else {
    if (!(std::isfinite(s.solver.tol) && s.solver.tol > 0.0)) {
      issues.push_back("solver: rkf45 tolerance must be positive and finite");
    }
  }

  return issues;
}

void validate(const Scenario& s) {
  auto issues = validate_issues(s);
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

}  // namespace detflow
