#include "detflow/scenario_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "detflow/errors.hpp"

namespace detflow {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
  throw ParseError(origin + ": " + what);
}

const json& require_key(const json& obj, const char* key, const std::string& origin) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(origin, std::string("missing field \"") + key + "\"");
  return *it;
}

double require_number(const json& v, const char* key, const std::string& origin) {
  if (!v.is_number()) fail(origin, std::string("field \"") + key + "\" must be a number");
  return v.get<double>();
}

// Row-major square matrix from a flat number array; the dimension is the
// integer square root of the length.
Matrix matrix_from(const json& v, const std::string& field, const std::string& origin) {
  if (!v.is_array()) fail(origin, "field \"" + field + "\" must be a flat number array");
  std::vector<double> elems;
  elems.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number()) fail(origin, "field \"" + field + "\" must contain only numbers");
    elems.push_back(e.get<double>());
  }
  const auto len = elems.size();
  const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(len))));
  if (len == 0 || static_cast<std::size_t>(n) * n != len) {
    fail(origin, "field \"" + field + "\" has " + std::to_string(len) +
                     " elements, not a square count");
  }
  try {
    return Matrix(n, std::move(elems));
  } catch (const std::invalid_argument& e) {
    fail(origin, "field \"" + field + "\": " + e.what());
  }
}

CoefficientSpec coeff_from(const json& v, const std::string& field, int scenario_n,
                           const std::string& origin) {
  if (!v.is_object()) fail(origin, "coefficient \"" + field + "\" must be an object");
  const std::string kind =
      require_key(v, "kind", origin).is_string()
          ? v["kind"].get<std::string>()
          : (fail(origin, "coefficient \"" + field + "\" kind must be a string"), "");
  if (kind == "zero") {
    return ZeroCoeff{scenario_n};
  }
  if (kind == "constant") {
    return ConstantCoeff{matrix_from(require_key(v, "value", origin), field + ".value", origin)};
  }
  if (kind == "polynomial") {
    const json& arr = require_key(v, "coeffs", origin);
    if (!arr.is_array() || arr.empty()) {
      fail(origin, "coefficient \"" + field + "\" coeffs must be a non-empty array of matrices");
    }
    PolynomialCoeff p;
    for (std::size_t k = 0; k < arr.size(); ++k) {
      p.coeffs.push_back(
          matrix_from(arr[k], field + ".coeffs[" + std::to_string(k) + "]", origin));
    }
    return p;
  }
  if (kind == "sinusoidal") {
    SinusoidalCoeff s{
        matrix_from(require_key(v, "m0", origin), field + ".m0", origin),
        matrix_from(require_key(v, "m1", origin), field + ".m1", origin),
        require_number(require_key(v, "omega", origin), "omega", origin),
        require_number(require_key(v, "phi", origin), "phi", origin)};
    return s;
  }
  if (kind == "tabulated") {
    TabulatedCoeff t;
    const json& times = require_key(v, "times", origin);
    const json& values = require_key(v, "values", origin);
    if (!times.is_array() || !values.is_array()) {
      fail(origin, "coefficient \"" + field + "\" times/values must be arrays");
    }
    for (const auto& e : times) t.times.push_back(require_number(e, "times", origin));
    for (std::size_t k = 0; k < values.size(); ++k) {
      t.values.push_back(
          matrix_from(values[k], field + ".values[" + std::to_string(k) + "]", origin));
    }
    if (t.times.size() != t.values.size()) {
      fail(origin, "coefficient \"" + field + "\" times/values lengths differ");
    }
    return t;
  }
  fail(origin, "coefficient \"" + field + "\" has unknown kind \"" + kind + "\"");
}

SolverConfig solver_from(const json& v, const std::string& origin) {
  SolverConfig cfg;
  if (!v.is_object()) fail(origin, "field \"solver\" must be an object");
  bool has_method = false;
  if (auto it = v.find("method"); it != v.end()) {
    if (!it->is_string()) fail(origin, "solver.method must be a string");
    const std::string m = it->get<std::string>();
    if (m == "rk4") {
      cfg.method = SolveMethod::Rk4Fixed;
    } else if (m == "rkf45") {
      cfg.method = SolveMethod::Rkf45Adaptive;
    } else {
      fail(origin, "solver.method must be \"rk4\" or \"rkf45\", got \"" + m + "\"");
    }
    has_method = true;
  }
  const bool has_h = v.contains("h");
  const bool has_tol = v.contains("tol");
  if (!has_method) {
    if (has_h && !has_tol) {
      cfg.method = SolveMethod::Rk4Fixed;
    } else if (has_tol && !has_h) {
      cfg.method = SolveMethod::Rkf45Adaptive;
    } else {
      fail(origin, "solver needs \"method\", or exactly one of \"h\"/\"tol\"");
    }
  }
  if (has_h) cfg.h = require_number(v["h"], "solver.h", origin);
  if (has_tol) cfg.tol = require_number(v["tol"], "solver.tol", origin);
  return cfg;
}

}  // namespace

Scenario parse_scenario_text(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(origin, e.what());
  }
  if (!doc.is_object()) fail(origin, "scenario document must be a JSON object");

  Scenario s;
  const json& n = require_key(doc, "n", origin);
  if (!n.is_number_integer()) fail(origin, "field \"n\" must be an integer");
  s.n = n.get<int>();
  s.t0 = require_number(require_key(doc, "t0", origin), "t0", origin);
  s.t_end = require_number(require_key(doc, "t_end", origin), "t_end", origin);
  s.x0 = matrix_from(require_key(doc, "x0", origin), "x0", origin);
  s.a = coeff_from(require_key(doc, "a", origin), "a", s.n, origin);
  s.b = coeff_from(require_key(doc, "b", origin), "b", s.n, origin);
  s.f = coeff_from(require_key(doc, "f", origin), "f", s.n, origin);
  s.solver = solver_from(require_key(doc, "solver", origin), origin);
  if (auto it = doc.find("seed"); it != doc.end()) {
    if (!it->is_number_unsigned()) fail(origin, "field \"seed\" must be a non-negative integer");
    s.seed = it->get<std::uint64_t>();
  }

  validate(s);
  return s;
}

Scenario parse_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), path);
}

}  // namespace detflow
