#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lm/lp/interior_point.hpp"
#include "lm/lp/model.hpp"
#include "lm/lp/simplex.hpp"

namespace lm::lp {

enum class Backend { Auto, DenseSimplex, InteriorPoint, External };

struct SolveOptions {
  Backend backend = Backend::Auto;
  SimplexOptions simplex;
  IpmOptions ipm;
  // Command invoked as `<command> model.lp solution.json`; empty falls back
  // to the LEVELMATCH_LP_SOLVER environment variable.
  std::string external_command;
  bool recheck = true;  // independent feasibility audit of optimal solutions
};

// Solves with the selected backend. Auto picks the dense simplex for small
// models and the interior-point method otherwise. Optimal solutions are
// clamped to their bounds and re-checked by a separate code path; a re-check
// failure beyond the project feasibility tolerance throws std::runtime_error.
LPSolution solve(const LinearProgram& lp, const SolveOptions& options = {});

// Violated rows to append, produced from the current relaxation's solution.
using Separator = std::function<std::vector<Row>(const LPSolution&)>;

struct RowGenerationResult {
  LPSolution solution;
  int rounds = 0;
  int added_rows = 0;
};

// Thrown when max_rounds is exhausted; carries the best relaxation solved.
class RowGenerationLimit : public std::runtime_error {
 public:
  RowGenerationLimit(const std::string& what, LPSolution best)
      : std::runtime_error(what), best_solution(std::move(best)) {}
  LPSolution best_solution;
};

// Cutting-plane loop: solve the master, append the separator's violated
// rows, repeat until the separator returns none.
RowGenerationResult solve_with_row_generation(LinearProgram& master, const Separator& separator,
                                              int max_rounds, const SolveOptions& options = {});

// Optimum of the degree-constrained fractional matching LP
// (max sum x_e subject to per-vertex sums <= 1, 0 <= x_e <= 1).
double offline_fractional_optimum(const std::vector<std::pair<int, int>>& edges);

}  // namespace lm::lp
