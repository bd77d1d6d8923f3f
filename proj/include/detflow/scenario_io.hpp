#pragma once

#include <string>

#include "detflow/coeffs.hpp"

namespace detflow {

// Reads and validates a scenario document (UTF-8 JSON, schema in README).
// Throws ParseError for malformed documents and ValidationError for
// well-formed documents that violate scenario invariants.
Scenario parse_scenario(const std::string& path);

// Same, from an in-memory document; `origin` names the source in messages.
Scenario parse_scenario_text(const std::string& text, const std::string& origin);

}  // namespace detflow
