#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "detflow/coeffs.hpp"

namespace detflow {

struct RunOptions {
  std::optional<double> fail_threshold;  // exit 3 when any channel drift exceeds it
};

// Shortest round-trip decimal rendering; the CSV contract depends on it being
// locale-free and deterministic.
std::string format_double(double v);

// Integrates the scenario, evaluates every applicable identity channel and
// writes the CSV (rows + "# key=value" summary block) to `out`. Returns the
// process exit code: 0 success, 2 integration failure, 3 threshold breach.
// Failure reasons go to `err` as a single machine-readable line.
int run(const Scenario& s, std::ostream& out, std::ostream& err, const RunOptions& opt);

}  // namespace detflow
