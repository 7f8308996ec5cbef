#pragma once

#include "lm/lp/model.hpp"

namespace lm::lp {

struct SimplexOptions {
  int max_iterations = 0;  // 0 picks 20000 + 50 * rows
  double dual_tolerance = 1e-9;
  double pivot_tolerance = 1e-10;
};

// Bounded-variable two-phase simplex with an explicit dense basis inverse.
// Intended for the small and mid-size models this project generates (a few
// thousand rows); detects infeasibility and unboundedness exactly. Rejects
// variables that are unbounded on both sides.
LPSolution solve_dense_simplex(const LinearProgram& lp, const SimplexOptions& options = {});

}  // namespace lm::lp
