#pragma once

#include <string>

#include "lm/lp/model.hpp"

namespace lm::lp {

// Serializes a model in LP text format (Maximize / Subject To / Bounds /
// End). A leading comment records the variable order so that importing and
// re-exporting reproduces the file byte for byte; numbers use %.17g and
// survive the round trip exactly.
std::string lp_to_string(const LinearProgram& lp);

// Parses the subset of the LP format that lp_to_string emits (plus minor
// whitespace freedom). Throws std::invalid_argument on anything else.
LinearProgram lp_from_string(const std::string& text);

void save_lp(const LinearProgram& lp, const std::string& path);
LinearProgram load_lp(const std::string& path);

// Solver-exchange JSON: {"status": ..., "objective": ..., "values": {...}}.
// Values may also be an array in variable order.
std::string solution_to_json(const LinearProgram& lp, const LPSolution& solution);
LPSolution solution_from_json(const LinearProgram& lp, const std::string& text);

}  // namespace lm::lp
