#include "lm/lp/solve.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "lm/core/json_io.hpp"
#include "lm/core/tolerances.hpp"
#include "lm/lp/lp_file.hpp"

namespace lm::lp {

namespace {

LPSolution solve_external(const LinearProgram& lp, const SolveOptions& options) {
  std::string command = options.external_command;
  if (command.empty()) {
    const char* env = std::getenv("LEVELMATCH_LP_SOLVER");
    if (env != nullptr) command = env;
  }
  if (command.empty()) {
    throw std::runtime_error(
        "external LP backend requested but neither external_command nor "
        "LEVELMATCH_LP_SOLVER is set");
  }

  static std::atomic<int> counter{0};
  const int id = counter++;
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path();
  const std::string stem = "levelmatch_lp_" + std::to_string(id);
  const fs::path lp_path = dir / (stem + ".lp");
  const fs::path out_path = dir / (stem + ".json");

  save_lp(lp, lp_path.string());
  const std::string full = command + " \"" + lp_path.string() + "\" \"" + out_path.string() + "\"";
  const int rc = std::system(full.c_str());
  if (rc != 0) {
    throw std::runtime_error("external LP solver failed with exit code " + std::to_string(rc) +
                             ": " + full);
  }
  LPSolution solution = solution_from_json(lp, lm::read_text_file(out_path.string()));
  std::error_code ignore;
  fs::remove(lp_path, ignore);
  fs::remove(out_path, ignore);
  return solution;
}

}  // namespace

LPSolution solve(const LinearProgram& lp, const SolveOptions& options) {
  lp.validate();
  Backend backend = options.backend;
  if (backend == Backend::Auto) {
    backend = (lp.num_rows() <= 600 && lp.num_variables() <= 1500) ? Backend::DenseSimplex
                                                                   : Backend::InteriorPoint;
  }

  LPSolution solution;
  switch (backend) {
    case Backend::DenseSimplex: solution = solve_dense_simplex(lp, options.simplex); break;
    case Backend::InteriorPoint: solution = solve_interior_point(lp, options.ipm); break;
    case Backend::External: solution = solve_external(lp, options); break;
    case Backend::Auto: break;  // unreachable
  }

  if (solution.status == Status::Optimal) {
    for (int v = 0; v < lp.num_variables(); ++v) {
      solution.values[v] = std::clamp(solution.values[v], lp.lower(v), lp.upper(v));
    }
    solution.objective_value = lp.objective_value(solution.values);
    if (options.recheck) {
      const FeasibilityCheck check = check_feasibility(lp, solution.values);
      if (check.max_row_violation > tol::kLpFeas) {
        std::ostringstream why;
        why << "backend " << solution.backend << " returned an infeasible optimum: row "
            << (check.worst_row >= 0 ? lp.row(check.worst_row).name : std::string("?"))
            << " violated by " << check.max_row_violation;
        throw std::runtime_error(why.str());
      }
    }
  }
  return solution;
}

RowGenerationResult solve_with_row_generation(LinearProgram& master, const Separator& separator,
                                              int max_rounds, const SolveOptions& options) {
  RowGenerationResult result;
  LPSolution last;
  for (int round = 0; round < max_rounds; ++round) {
    last = solve(master, options);
    if (last.status != Status::Optimal) {
      throw std::runtime_error("row generation: master solve ended with status " +
                               to_string(last.status) + (last.message.empty() ? "" : ": ") +
                               last.message);
    }
    std::vector<Row> violated = separator(last);
    result.rounds = round + 1;
    if (violated.empty()) {
      result.solution = std::move(last);
      return result;
    }
    for (Row& row : violated) {
      master.add_row(std::move(row.entries), row.rel, row.rhs, std::move(row.name));
      ++result.added_rows;
    }
  }
  throw RowGenerationLimit(
      "row generation: separator still produced rows after " + std::to_string(max_rounds) +
          " rounds",
      std::move(last));
}

double offline_fractional_optimum(const std::vector<std::pair<int, int>>& edges) {
  if (edges.empty()) return 0.0;
  int vertices = 0;
  for (const auto& [u, v] : edges) vertices = std::max({vertices, u + 1, v + 1});

  LinearProgram lp;
  lp.set_sense(Sense::Maximize);
  std::vector<std::vector<std::pair<int, double>>> incident(vertices);
  for (size_t e = 0; e < edges.size(); ++e) {
    const int var = lp.add_variable("x_" + std::to_string(edges[e].first) + "_" +
                                        std::to_string(edges[e].second),
                                    0.0, 1.0, 1.0);
    incident[edges[e].first].emplace_back(var, 1.0);
    incident[edges[e].second].emplace_back(var, 1.0);
  }
  for (int u = 0; u < vertices; ++u) {
    if (!incident[u].empty()) {
      lp.add_row(incident[u], Relation::LE, 1.0, "deg_" + std::to_string(u));
    }
  }
  const LPSolution solution = solve(lp);
  if (solution.status != Status::Optimal) {
    throw std::runtime_error("offline fractional optimum: solve ended with status " +
                             to_string(solution.status));
  }
  return solution.objective_value;
}

}  // namespace lm::lp
