#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "lm/algorithms/gain_bounds.hpp"
#include "lm/algorithms/matching_engine.hpp"
#include "lm/algorithms/script_gen.hpp"
#include "lm/core/types.hpp"
#include "lm/factor/factor_lp.hpp"
#include "lm/pricing/price_system.hpp"

using namespace lm;

namespace {

// One edge, both deadlines: the smallest script with nontrivial pricing.
InstanceScript path_script() {
  InstanceScript script;
  script.model = Model::FullyOnline;
  script.bipartite_hint = true;
  script.events.push_back({EventKind::Arrival, 0, {}});
  script.events.push_back({EventKind::Arrival, 1, {0}});
  script.events.push_back({EventKind::Deadline, 0, {}});
  script.events.push_back({EventKind::Deadline, 1, {}});
  return script;
}

InstanceScript general_edge_script() {
  InstanceScript script;
  script.model = Model::GeneralArrival;
  script.bipartite_hint = true;
  script.events.push_back({EventKind::Arrival, 0, {}});
  script.events.push_back({EventKind::Arrival, 1, {0}});
  return script;
}

// Solved one time per test binary; several cases below share them.
const FactorSolution& solved_fully_10() {
  static const FactorSolution solution = [] {
    FactorLPSpec spec;
    spec.n = 10;
    return solve_factor_lp(spec);
  }();
  return solution;
}

const FactorSolution& solved_general_10() {
  static const FactorSolution solution = [] {
    FactorLPSpec spec;
    spec.family = FactorFamily::GeneralArrival;
    spec.n = 10;
    return solve_factor_lp(spec);
  }();
  return solution;
}

}  // namespace

TEST_CASE("identity prices on one edge stop at the half level") {
  RunConfig config;
  config.step = 1e-4;
  const auto report = run_fully_online(
      path_script(), AlgorithmKind::history_pricing_fully(PriceSystem::identity_prices(1)),
      config);
  const MatchingState& state = report.final_state;
  // Arrival of 1: both levels rise in lockstep until x_0 + x_1 = 1, so the
  // frozen arrival level lands on one half; the deadline of 0 then fills
  // the pair to saturation.
  CHECK(state.a_level[0] == 0.0);
  CHECK(std::abs(state.a_level[1] - 0.5) <= 1e-9);
  CHECK(std::abs(state.x_level[0] - 1.0) <= 1e-9);
  CHECK(std::abs(state.x_level[1] - 1.0) <= 1e-9);
  CHECK(std::abs(report.primal - 1.0) <= 1e-9);
  CHECK(std::abs(report.primal - report.dual) <= 1e-9);
  CHECK(report.offline_opt == 1.0);
  CHECK(std::abs(report.ratio - 1.0) <= 1e-9);
  CHECK(std::abs(report.min_edge_dual_slack - 1.0) <= 1e-9);
  // The dual split integrates the running price: the passive-then-active
  // vertex 0 collects x dx on [0, 1/2] and (1 - x) dx on [1/2, 1].
  CHECK(std::abs(state.alpha[0] - 0.25) <= 1e-3);
  CHECK(std::abs(state.alpha[1] - 0.75) <= 1e-3);
}

TEST_CASE("arrival stop rule lands within one step of the continuous level") {
  // 3e-3 does not divide 1/2, so the lockstep rise cannot hit the boundary
  // exactly; the stop rule must still leave at most one step of overshoot.
  RunConfig config;
  config.step = 3e-3;
  const auto report = run_fully_online(
      path_script(), AlgorithmKind::history_pricing_fully(PriceSystem::identity_prices(8)),
      config);
  const double a = report.final_state.a_level[1];
  CHECK(a >= 0.5 - 1e-9);
  CHECK(a <= 0.5 + config.step + 1e-9);
}

TEST_CASE("lazy water filling splits a star evenly at the center's deadline") {
  InstanceScript script;
  script.model = Model::FullyOnline;
  script.bipartite_hint = true;
  script.events.push_back({EventKind::Arrival, 0, {}});
  script.events.push_back({EventKind::Arrival, 1, {}});
  script.events.push_back({EventKind::Arrival, 2, {0, 1}});
  script.events.push_back({EventKind::Deadline, 2, {}});
  script.events.push_back({EventKind::Deadline, 0, {}});
  script.events.push_back({EventKind::Deadline, 1, {}});
  RunConfig config;
  config.step = 1e-4;
  const auto report = run_fully_online(script, AlgorithmKind::water_filling(), config);
  const MatchingState& state = report.final_state;
  // Nothing moves at arrivals; the center's deadline alternates micro-steps
  // between the two equally low leaves.
  CHECK(std::abs(state.x_level[2] - 1.0) <= 1e-9);
  CHECK(std::abs(state.x_level[0] - 0.5) <= 2e-4);
  CHECK(std::abs(state.x_level[1] - 0.5) <= 2e-4);
  CHECK(report.offline_opt == 1.0);
  CHECK(std::abs(report.ratio - 1.0) <= 1e-9);
  CHECK(std::abs(report.primal - report.dual) <= 1e-9);
}

TEST_CASE("an isolated vertex reports the empty-instance conventions") {
  InstanceScript script;
  script.model = Model::FullyOnline;
  script.events.push_back({EventKind::Arrival, 0, {}});
  script.events.push_back({EventKind::Deadline, 0, {}});
  const auto report = run_fully_online(script, AlgorithmKind::water_filling(), RunConfig{});
  CHECK(report.primal == 0.0);
  CHECK(report.dual == 0.0);
  CHECK(report.offline_opt == 0.0);
  CHECK(report.ratio == 1.0);
  CHECK(std::isinf(report.min_edge_dual_slack));
}

TEST_CASE("general arrival identity run matches half an edge") {
  RunConfig config;
  config.step = 1e-4;
  const auto report = run_general_arrival(
      general_edge_script(),
      AlgorithmKind::history_pricing_general(PriceSystem::identity_prices(1)), config);
  const MatchingState& state = report.final_state;
  CHECK(state.a_level[0] == 0.0);
  CHECK(std::abs(state.a_level[1] - 0.5) <= 1e-9);
  CHECK(std::abs(state.x_level[0] - 0.5) <= 1e-9);
  CHECK(std::abs(report.primal - 0.5) <= 1e-9);
  CHECK(std::abs(report.primal - report.dual) <= 1e-9);
  CHECK(report.offline_opt == 1.0);
  CHECK(std::abs(report.ratio - 0.5) <= 1e-9);
}

TEST_CASE("classical water filling saturates a general arrival when it can") {
  InstanceScript script;
  script.model = Model::GeneralArrival;
  script.events.push_back({EventKind::Arrival, 0, {}});
  script.events.push_back({EventKind::Arrival, 1, {0}});
  RunConfig config;
  config.step = 1e-3;
  const auto report = run_general_arrival(script, AlgorithmKind::water_filling(), config);
  // No price cap in plain water filling: the arrival fills the whole edge.
  CHECK(std::abs(report.final_state.x_level[0] - 1.0) <= 1e-9);
  CHECK(std::abs(report.final_state.x_level[1] - 1.0) <= 1e-9);
  CHECK(std::abs(report.primal - 1.0) <= 1e-9);
}

TEST_CASE("greedy matches maximally at the arrival") {
  RunConfig config;
  const auto report = run_fully_online(path_script(), AlgorithmKind::greedy(), config);
  const MatchingState& state = report.final_state;
  CHECK(state.x_level[0] == 1.0);
  CHECK(state.x_level[1] == 1.0);
  CHECK(state.alpha[0] == 0.5);
  CHECK(state.alpha[1] == 0.5);
  CHECK(report.ratio == 1.0);
}

TEST_CASE("force_level raises a level without touching edges or duals") {
  MatchingEngine engine(Model::GeneralArrival, AlgorithmKind::water_filling(), RunConfig{});
  engine.add_arrival({});
  engine.force_level(0, 0.4);
  CHECK(engine.state().x_level[0] == 0.4);
  CHECK(engine.state().alpha[0] == 0.0);
  CHECK(engine.state().revealed_edges.empty());
  engine.add_arrival({0});
  // Water filling stops this arrival only when the prefilled neighbor
  // saturates, leaving the new vertex at the remaining capacity.
  CHECK(std::abs(engine.state().x_level[0] - 1.0) <= 1e-9);
  CHECK(std::abs(engine.state().x_level[1] - 0.6) <= 1e-9);
  CHECK_THROWS_AS(engine.force_level(0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(engine.force_level(1, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(engine.force_level(7, 0.1), std::invalid_argument);
}

TEST_CASE("engine rejects invalid configurations and events") {
  const PriceSystem identity = PriceSystem::identity_prices(4);
  RunConfig config;
  config.step = 0.0;
  CHECK_THROWS_AS(MatchingEngine(Model::FullyOnline, AlgorithmKind::greedy(), config),
                  std::invalid_argument);
  config.step = 0.5;
  CHECK_THROWS_AS(MatchingEngine(Model::FullyOnline, AlgorithmKind::greedy(), config),
                  std::invalid_argument);
  config.step = 1e-3;
  CHECK_THROWS_AS(
      MatchingEngine(Model::GeneralArrival, AlgorithmKind::history_pricing_fully(identity),
                     config),
      std::invalid_argument);
  CHECK_THROWS_AS(
      MatchingEngine(Model::GeneralArrival, AlgorithmKind::eager_water_filling(identity), config),
      std::invalid_argument);
  CHECK_THROWS_AS(
      MatchingEngine(Model::FullyOnline, AlgorithmKind::history_pricing_general(identity), config),
      std::invalid_argument);
  AlgorithmKind bare;
  bare.variant = AlgorithmVariant::EagerWaterFilling;  // no price system attached
  CHECK_THROWS_AS(MatchingEngine(Model::FullyOnline, bare, config), std::invalid_argument);

  MatchingEngine fully(Model::FullyOnline, AlgorithmKind::greedy(), config);
  fully.add_arrival({});
  CHECK_THROWS_AS(fully.add_arrival({1}), std::invalid_argument);   // not arrived yet
  CHECK_THROWS_AS(fully.add_arrival({0, 0}), std::invalid_argument);  // duplicate
  fully.add_deadline(0);
  CHECK_THROWS_AS(fully.add_deadline(0), std::invalid_argument);  // repeated
  CHECK_THROWS_AS(fully.add_deadline(9), std::invalid_argument);  // unknown

  MatchingEngine general(Model::GeneralArrival, AlgorithmKind::greedy(), config);
  general.add_arrival({});
  CHECK_THROWS_AS(general.add_deadline(0), std::invalid_argument);

  CHECK_THROWS_AS(run_fully_online(general_edge_script(), AlgorithmKind::greedy(), config),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_general_arrival(path_script(), AlgorithmKind::greedy(), config),
                  std::invalid_argument);
}

TEST_CASE("variant factories carry their price systems") {
  CHECK(!AlgorithmKind::greedy().price_bearing());
  CHECK(!AlgorithmKind::water_filling().price_bearing());
  CHECK(AlgorithmKind::eager_water_filling(PriceSystem::identity_prices(2)).price_bearing());
  CHECK(AlgorithmKind::history_pricing_fully(PriceSystem::identity_prices(2)).price_bearing());
  CHECK(AlgorithmKind::history_pricing_general(PriceSystem::identity_prices(2)).price_bearing());
  CHECK(to_string(AlgorithmVariant::Greedy) == "greedy");
  CHECK(to_string(AlgorithmVariant::WaterFilling) == "waterfilling");
  CHECK(to_string(AlgorithmVariant::EagerWaterFilling) == "eager_waterfilling");
  CHECK(to_string(AlgorithmVariant::HistoryPricingFully) == "history_fully");
  CHECK(to_string(AlgorithmVariant::HistoryPricingGeneral) == "history_general");
}

TEST_CASE("degenerate price systems expose the level curve directly") {
  const PriceSystem identity = PriceSystem::identity_prices(8);
  CHECK(!identity.certified());
  CHECK(identity.diagonal_inverse(0.375) == 0.375);
  CHECK(std::abs(identity.f_of(0.3) - 0.3) <= 1e-9);
  CHECK(std::abs(identity.g_of(0.2, 0.7) - 0.7) <= 1e-9);
  CHECK(identity.price_row(0.3).price_at(0.5) == 0.5);

  std::vector<double> quadratic(9);
  for (int j = 0; j <= 8; ++j) quadratic[j] = (j * j) / 64.0;
  const PriceSystem curved = PriceSystem::from_level_curve(quadratic);
  CHECK(!curved.certified());
  // price_at must reproduce the curve exactly at the nodes.
  CHECK(curved.price_row(0.0).price_at(quadratic[3]) == 3.0 / 8.0);

  CHECK_THROWS_AS(PriceSystem::from_level_curve({0.0, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(PriceSystem::from_level_curve({0.0, 0.7, 0.3, 1.0}), std::invalid_argument);
}

TEST_CASE("eager water filling equals history pricing on level-curve systems") {
  std::vector<double> quadratic(9);
  for (int j = 0; j <= 8; ++j) quadratic[j] = (j * j) / 64.0;
  const std::vector<PriceSystem> systems = {PriceSystem::identity_prices(8),
                                            PriceSystem::from_level_curve(quadratic)};
  RunConfig config;
  config.step = 1e-3;
  for (size_t s = 0; s < systems.size(); ++s) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      RandomScriptParams params;
      params.seed = seed * 2 + s;
      const InstanceScript script = random_script(params);
      const auto eager =
          run_fully_online(script, AlgorithmKind::eager_water_filling(systems[s]), config);
      const auto history =
          run_fully_online(script, AlgorithmKind::history_pricing_fully(systems[s]), config);
      CAPTURE(s);
      CAPTURE(seed);
      double worst = 0.0;
      for (int v = 0; v < script.vertex_count(); ++v) {
        worst = std::max(worst, std::abs(eager.final_state.x_level[v] -
                                         history.final_state.x_level[v]));
        worst = std::max(worst, std::abs(eager.final_state.a_level[v] -
                                         history.final_state.a_level[v]));
        worst = std::max(worst,
                         std::abs(eager.final_state.alpha[v] - history.final_state.alpha[v]));
      }
      REQUIRE(worst <= 1e-9);
    }
  }
}

TEST_CASE("random runs keep the primal equal to the dual") {
  RunConfig config;
  config.step = 1e-3;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    RandomScriptParams params;
    params.seed = seed;
    const InstanceScript fully = random_script(params);
    CHECK(validate_script(fully).empty());
    const auto report = run_fully_online(
        fully, AlgorithmKind::history_pricing_fully(PriceSystem::identity_prices(8)), config);
    CAPTURE(seed);
    CHECK(std::abs(report.primal - report.dual) <= 1e-9);
    CHECK(report.ratio <= 1.0 + 1e-4);
    for (double x : report.final_state.x_level) CHECK(x <= 1.0 + 1e-9);

    params.model = Model::GeneralArrival;
    const InstanceScript general = random_script(params);
    CHECK(validate_script(general).empty());
    const auto general_report = run_general_arrival(
        general, AlgorithmKind::history_pricing_general(PriceSystem::identity_prices(8)), config);
    CHECK(std::abs(general_report.primal - general_report.dual) <= 1e-9);
    CHECK(general_report.ratio <= 1.0 + 1e-4);
  }
}

TEST_CASE("batches are deterministic, ordered, and fault isolated") {
  RunConfig config;
  config.step = 1e-3;
  RandomScriptParams params;
  params.seed = 11;
  const InstanceScript script = random_script(params);
  const AlgorithmKind algo =
      AlgorithmKind::history_pricing_fully(PriceSystem::identity_prices(8));

  const BatchResult empty = batch_run({}, algo, config);
  CHECK(empty.items.empty());
  CHECK(std::isinf(empty.min_ratio));

  const std::vector<InstanceScript> copies = {script, script, script};
  const BatchResult serial = batch_run(copies, algo, config, 1);
  const BatchResult parallel = batch_run(copies, algo, config, 2);
  REQUIRE(serial.items.size() == 3);
  REQUIRE(parallel.items.size() == 3);
  for (size_t i = 0; i < copies.size(); ++i) {
    REQUIRE(serial.items[i].report.has_value());
    REQUIRE(parallel.items[i].report.has_value());
    CHECK(run_report_to_json(*serial.items[i].report) ==
          run_report_to_json(*serial.items[0].report));
    CHECK(run_report_to_json(*parallel.items[i].report) ==
          run_report_to_json(*serial.items[i].report));
  }
  CHECK(serial.min_ratio == serial.items[0].report->ratio);

  // A script whose model rejects the variant fails in place; the rest of
  // the batch still runs.
  const BatchResult mixed = batch_run({script, general_edge_script()}, algo, config);
  REQUIRE(mixed.items.size() == 2);
  CHECK(mixed.items[0].report.has_value());
  CHECK(!mixed.items[1].report.has_value());
  CHECK(!mixed.items[1].error.empty());
  CHECK_THROWS_AS(batch_run(copies, algo, config, 0), std::invalid_argument);
}

TEST_CASE("traces cover every vertex at every event and serialize to csv") {
  RunConfig config;
  config.step = 1e-3;
  config.record_trace = true;
  const auto report = run_fully_online(
      path_script(), AlgorithmKind::history_pricing_fully(PriceSystem::identity_prices(1)),
      config);
  REQUIRE(report.trace.size() == 4 * 2);
  // Right after the first event, vertex 1 has not arrived: level zero and an
  // undefined frozen level.
  CHECK(report.trace[0].vertex == 0);
  CHECK(report.trace[1].vertex == 1);
  CHECK(report.trace[1].x_level == 0.0);
  CHECK(std::isnan(report.trace[1].a_level));
  const std::string csv = trace_to_csv(report.trace);
  CHECK(csv.rfind("event_index,vertex,x_level,a_level,alpha\n", 0) == 0);
  CHECK(csv.find("nan") != std::string::npos);
  size_t lines = 0;
  for (char c : csv) lines += c == '\n';
  CHECK(lines == 1 + report.trace.size());
}

TEST_CASE("run reports serialize scalars, vertices, and tracked edges") {
  RunConfig config;
  config.step = 1e-3;
  const auto report = run_fully_online(
      path_script(), AlgorithmKind::history_pricing_fully(PriceSystem::identity_prices(1)),
      config);
  const std::string json = run_report_to_json(report);
  CHECK(json.find("\"primal\"") != std::string::npos);
  CHECK(json.find("\"vertices\"") != std::string::npos);
  CHECK(json.find("\"edges\"") != std::string::npos);
  CHECK(json.back() == '\n');

  RunConfig untracked = config;
  untracked.track_edges = false;
  const auto slim = run_fully_online(
      path_script(), AlgorithmKind::history_pricing_fully(PriceSystem::identity_prices(1)),
      untracked);
  CHECK(std::abs(slim.primal - report.primal) <= 1e-9);
  CHECK(run_report_to_json(slim).find("\"edges\"") == std::string::npos);

  // An isolated vertex has no edges, hence a null slack in the report.
  InstanceScript lonely;
  lonely.model = Model::GeneralArrival;
  lonely.events.push_back({EventKind::Arrival, 0, {}});
  const auto lonely_report = run_general_arrival(lonely, AlgorithmKind::greedy(), config);
  CHECK(run_report_to_json(lonely_report).find("\"min_edge_dual_slack\": null") !=
        std::string::npos);
}

TEST_CASE("bipartite shortcut and matching lp agree on the offline optimum") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RandomScriptParams params;
    params.bipartite = true;
    params.max_vertices = 12;
    params.seed = seed;
    InstanceScript script = random_script(params);
    const double via_matching = script_offline_optimum(script);
    script.bipartite_hint = false;
    const double via_lp = script_offline_optimum(script);
    CAPTURE(seed);
    CHECK(std::abs(via_matching - via_lp) <= 1e-5);
  }
}

TEST_CASE("per-pair gain bounds hold on identity prices") {
  const PriceSystem identity = PriceSystem::identity_prices(8);
  RunConfig config;
  config.step = 1e-3;
  config.record_trace = true;
  int fully_pairs = 0;
  int general_pairs = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomScriptParams params;
    params.seed = seed;
    const InstanceScript fully = random_script(params);
    const auto report =
        run_fully_online(fully, AlgorithmKind::history_pricing_fully(identity), config);
    const auto gains = check_gain_bounds(fully, report, identity);
    CAPTURE(seed);
    fully_pairs += gains.pairs_checked;
    if (gains.pairs_checked > 0) CHECK(gains.min_slack >= -0.02);

    params.model = Model::GeneralArrival;
    const InstanceScript general = random_script(params);
    const auto general_report =
        run_general_arrival(general, AlgorithmKind::history_pricing_general(identity), config);
    const auto general_gains = check_gain_bounds(general, general_report, identity);
    general_pairs += general_gains.pairs_checked;
    if (general_gains.pairs_checked > 0) CHECK(general_gains.min_slack >= -0.02);
  }
  // The suite must exercise real pairs, not pass on edgeless scripts.
  CHECK(fully_pairs > 100);
  CHECK(general_pairs > 100);
  CHECK_THROWS_AS(
      check_gain_bounds(path_script(),
                        run_fully_online(path_script(),
                                         AlgorithmKind::history_pricing_fully(identity),
                                         RunConfig{}),
                        identity),
      std::invalid_argument);  // no trace recorded
}

TEST_CASE("solved grids keep every edge's dual above their own gamma") {
  const FactorSolution& fully_solution = solved_fully_10();
  const PriceSystem fully_prices(fully_solution.grid);
  CHECK(fully_prices.certified());
  RunConfig config;
  config.step = 1e-3;
  config.record_trace = true;
  int fully_pairs = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    RandomScriptParams params;
    params.seed = 100 + seed;
    const InstanceScript script = random_script(params);
    const auto report =
        run_fully_online(script, AlgorithmKind::history_pricing_fully(fully_prices), config);
    const auto gains = check_gain_bounds(script, report, fully_prices);
    CAPTURE(seed);
    CHECK(std::abs(report.primal - report.dual) <= 1e-9);
    fully_pairs += gains.pairs_checked;
    if (gains.pairs_checked > 0) {
      CHECK(gains.min_slack >= -0.02);
      CHECK(report.min_edge_dual_slack >= fully_solution.gamma - 0.02);
    }
  }
  CHECK(fully_pairs > 0);

  const FactorSolution& general_solution = solved_general_10();
  const PriceSystem general_prices(general_solution.grid);
  int general_pairs = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    RandomScriptParams params;
    params.model = Model::GeneralArrival;
    params.seed = 200 + seed;
    const InstanceScript script = random_script(params);
    const auto report =
        run_general_arrival(script, AlgorithmKind::history_pricing_general(general_prices),
                            config);
    const auto gains = check_gain_bounds(script, report, general_prices);
    CAPTURE(seed);
    CHECK(std::abs(report.primal - report.dual) <= 1e-9);
    general_pairs += gains.pairs_checked;
    if (gains.pairs_checked > 0) {
      CHECK(gains.min_slack >= -0.02);
      CHECK(report.min_edge_dual_slack >= general_solution.gamma - 0.02);
    }
  }
  CHECK(general_pairs > 0);
}
