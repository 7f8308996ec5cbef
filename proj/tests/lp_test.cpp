#include <cmath>
#include <cstdlib>
#include <random>

#include "doctest.h"
#include "lm/lp/lp_file.hpp"
#include "lm/lp/solve.hpp"

using namespace lm::lp;

namespace {

LinearProgram box_lp() {
  LinearProgram lp;
  lp.set_sense(Sense::Maximize);
  const int x = lp.add_variable("x", 0.0, kInf, 1.0);
  lp.add_row({{x, 1.0}}, Relation::LE, 1.0, "cap");
  return lp;
}

// Random LP with a known interior point, so it is feasible by construction.
LinearProgram random_feasible_lp(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nv_dist(4, 12), nr_dist(3, 10);
  std::uniform_real_distribution<double> coef(-2.0, 2.0), point(0.2, 1.8);
  const int nv = nv_dist(rng);
  const int nr = nr_dist(rng);
  LinearProgram lp;
  lp.set_sense(Sense::Maximize);
  std::vector<double> x0(nv);
  for (int v = 0; v < nv; ++v) {
    lp.add_variable("v" + std::to_string(v), 0.0, 2.0, coef(rng));
    x0[v] = point(rng);
  }
  for (int i = 0; i < nr; ++i) {
    std::vector<std::pair<int, double>> entries;
    double activity = 0.0;
    for (int v = 0; v < nv; ++v) {
      if (rng() % 2 == 0) continue;
      const double a = coef(rng);
      entries.emplace_back(v, a);
      activity += a * x0[v];
    }
    if (entries.empty()) continue;
    const int kind = static_cast<int>(rng() % 3);
    if (kind == 0) {
      lp.add_row(entries, Relation::LE, activity + 0.5, "r" + std::to_string(i));
    } else if (kind == 1) {
      lp.add_row(entries, Relation::GE, activity - 0.5, "r" + std::to_string(i));
    } else {
      lp.add_row(entries, Relation::EQ, activity, "r" + std::to_string(i));
    }
  }
  return lp;
}

}  // namespace

TEST_CASE("simplex solves a one-variable box") {
  auto solution = solve_dense_simplex(box_lp());
  REQUIRE(solution.status == Status::Optimal);
  CHECK(solution.values[0] == doctest::Approx(1.0));
  CHECK(solution.objective_value == doctest::Approx(1.0));
}

TEST_CASE("simplex detects infeasibility") {
  LinearProgram lp;
  lp.set_sense(Sense::Maximize);
  const int x = lp.add_variable("x", 0.0, kInf, 1.0);
  lp.add_row({{x, 1.0}}, Relation::GE, 2.0);
  lp.add_row({{x, 1.0}}, Relation::LE, 1.0);
  CHECK(solve_dense_simplex(lp).status == Status::Infeasible);
}

TEST_CASE("simplex detects unboundedness") {
  LinearProgram lp;
  lp.set_sense(Sense::Maximize);
  const int x = lp.add_variable("x", 0.0, kInf, 1.0);
  const int y = lp.add_variable("y", 0.0, kInf, 0.0);
  lp.add_row({{x, 1.0}, {y, -1.0}}, Relation::LE, 1.0);
  CHECK(solve_dense_simplex(lp).status == Status::Unbounded);
}

TEST_CASE("interior point matches simplex on the box") {
  auto solution = solve_interior_point(box_lp());
  REQUIRE(solution.status == Status::Optimal);
  CHECK(solution.objective_value == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("equality rows survive both backends") {
  LinearProgram lp;
  lp.set_sense(Sense::Minimize);
  const int x = lp.add_variable("x", 0.0, 5.0, 1.0);
  const int y = lp.add_variable("y", 0.0, 5.0, 2.0);
  lp.add_row({{x, 1.0}, {y, 1.0}}, Relation::EQ, 3.0, "sum");
  lp.add_row({{x, 1.0}}, Relation::LE, 2.0, "cap");
  auto a = solve_dense_simplex(lp);
  auto b = solve_interior_point(lp);
  REQUIRE(a.status == Status::Optimal);
  REQUIRE(b.status == Status::Optimal);
  // optimum: x=2, y=1 -> 4
  CHECK(a.objective_value == doctest::Approx(4.0));
  CHECK(b.objective_value == doctest::Approx(4.0).epsilon(1e-7));
}

TEST_CASE("backends agree on random feasible LPs") {
  std::mt19937_64 rng(20240517);
  for (int trial = 0; trial < 40; ++trial) {
    LinearProgram lp = random_feasible_lp(rng);
    auto a = solve_dense_simplex(lp);
    REQUIRE(a.status == Status::Optimal);
    auto b = solve_interior_point(lp);
    REQUIRE(b.status == Status::Optimal);
    CHECK(std::abs(a.objective_value - b.objective_value) <
          1e-6 * (1.0 + std::abs(a.objective_value)));
  }
}

TEST_CASE("facade re-checks feasibility and clamps bounds") {
  auto solution = solve(box_lp());
  REQUIRE(solution.status == Status::Optimal);
  CHECK(solution.backend == "dense_simplex");
}

TEST_CASE("offline fractional optimum on canonical graphs") {
  CHECK(offline_fractional_optimum({{0, 1}}) == doctest::Approx(1.0));
  CHECK(offline_fractional_optimum({{0, 1}, {1, 2}, {0, 2}}) == doctest::Approx(1.5));
  CHECK(offline_fractional_optimum({{0, 1}, {1, 2}, {2, 3}, {3, 0}}) == doctest::Approx(2.0));
  CHECK(offline_fractional_optimum({}) == 0.0);
}

TEST_CASE("offline optimum dominates greedy integral matchings") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 6 + static_cast<int>(rng() % 10);
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        if (rng() % 3 == 0) edges.emplace_back(u, v);
      }
    }
    std::vector<char> used(n, 0);
    int greedy = 0;
    for (const auto& [u, v] : edges) {
      if (!used[u] && !used[v]) {
        used[u] = used[v] = 1;
        ++greedy;
      }
    }
    CHECK(offline_fractional_optimum(edges) >= greedy - 1e-9);
  }
}

TEST_CASE("LP text export and import round-trip byte for byte") {
  std::mt19937_64 rng(4242);
  LinearProgram lp = random_feasible_lp(rng);
  lp.set_bounds(0, -kInf, 1.25);
  lp.set_bounds(1, 0.5, 0.5);
  const std::string first = lp_to_string(lp);
  LinearProgram parsed = lp_from_string(first);
  CHECK(lp_to_string(parsed) == first);
  REQUIRE(parsed.num_variables() == lp.num_variables());
  REQUIRE(parsed.num_rows() == lp.num_rows());
  for (int v = 0; v < lp.num_variables(); ++v) {
    CHECK(parsed.variable_name(v) == lp.variable_name(v));
    CHECK(parsed.lower(v) == lp.lower(v));
    CHECK(parsed.upper(v) == lp.upper(v));
    CHECK(parsed.objective(v) == lp.objective(v));
  }
  auto a = solve_dense_simplex(lp);
  auto b = solve_dense_simplex(parsed);
  CHECK(a.objective_value == doctest::Approx(b.objective_value).epsilon(1e-12));
}

TEST_CASE("solution JSON round-trips") {
  LinearProgram lp = box_lp();
  auto solution = solve(lp);
  const std::string text = solution_to_json(lp, solution);
  LPSolution parsed = solution_from_json(lp, text);
  CHECK(parsed.status == Status::Optimal);
  CHECK(parsed.values[0] == solution.values[0]);
}

TEST_CASE("row generation with an enumerating separator matches the full LP") {
  // max x+y subject to cuts x+y <= 1.5, x <= 1, y <= 0.8 (the "full" LP).
  auto build_vars = [](LinearProgram& lp) {
    lp.set_sense(Sense::Maximize);
    lp.add_variable("x", 0.0, 2.0, 1.0);
    lp.add_variable("y", 0.0, 2.0, 1.0);
  };
  LinearProgram full;
  build_vars(full);
  full.add_row({{0, 1.0}, {1, 1.0}}, Relation::LE, 1.5);
  full.add_row({{0, 1.0}}, Relation::LE, 1.0);
  full.add_row({{1, 1.0}}, Relation::LE, 0.8);
  const double target = solve(full).objective_value;

  LinearProgram master;
  build_vars(master);
  std::vector<Row> pool = full.rows();
  auto separator = [&pool](const LPSolution& solution) {
    std::vector<Row> violated;
    for (const Row& row : pool) {
      double activity = 0.0;
      for (const auto& [var, coef] : row.entries) activity += coef * solution.values[var];
      if (activity > row.rhs + 1e-7) violated.push_back(row);
    }
    return violated;
  };
  auto result = solve_with_row_generation(master, separator, 20);
  CHECK(result.solution.objective_value == doctest::Approx(target).epsilon(1e-9));
  CHECK(result.added_rows <= 3);
}

TEST_CASE("row generation returns immediately with an empty separator") {
  LinearProgram master = box_lp();
  auto result = solve_with_row_generation(
      master, [](const LPSolution&) { return std::vector<Row>{}; }, 5);
  CHECK(result.rounds == 1);
  CHECK(result.solution.objective_value == doctest::Approx(1.0));
}

TEST_CASE("external backend runs the reference scipy tool") {
  if (std::system("python3 -c 'import scipy' >/dev/null 2>&1") != 0) {
    MESSAGE("scipy not available, skipping external backend test");
    return;
  }
  SolveOptions options;
  options.backend = Backend::External;
  options.external_command = std::string("python3 ") + LM_SOURCE_DIR + "/tools/lp_solve_scipy.py";
  std::mt19937_64 rng(31337);
  LinearProgram lp = random_feasible_lp(rng);
  auto external = solve(lp, options);
  auto internal = solve_dense_simplex(lp);
  REQUIRE(external.status == Status::Optimal);
  REQUIRE(internal.status == Status::Optimal);
  CHECK(external.objective_value ==
        doctest::Approx(internal.objective_value).epsilon(1e-7));
}

TEST_CASE("row generation limit carries the best solution") {
  LinearProgram master = box_lp();
  auto separator = [&master](const LPSolution&) {
    // Keeps producing fresh, slightly tighter rows forever.
    static double cap = 1.0;
    cap *= 0.999;
    return std::vector<Row>{Row{{{0, 1.0}}, Relation::LE, cap, ""}};
  };
  CHECK_THROWS_AS(solve_with_row_generation(master, separator, 3), RowGenerationLimit);
}
