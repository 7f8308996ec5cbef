#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lm/core/state.hpp"
#include "lm/core/types.hpp"
#include "lm/pricing/price_system.hpp"

namespace lm {

enum class AlgorithmVariant {
  Greedy,
  WaterFilling,
  EagerWaterFilling,
  HistoryPricingFully,
  HistoryPricingGeneral,
};

std::string to_string(AlgorithmVariant variant);

// Selects the online algorithm a run executes. Price-bearing variants carry
// the price system driving them; construct through the factories so that
// invariant cannot be broken by hand-rolled instances.
struct AlgorithmKind {
  AlgorithmVariant variant = AlgorithmVariant::Greedy;
  // Null exactly for Greedy and WaterFilling. Shared so parallel batch runs
  // can read one system concurrently.
  std::shared_ptr<const PriceSystem> prices;

  static AlgorithmKind greedy();
  static AlgorithmKind water_filling();
  // Water-filling that also matches at arrivals, paying the single-argument
  // price f(x_v) read off the system's diagonal. The two-argument structure
  // of f_spec is ignored, so this is normally handed a degenerate system
  // from PriceSystem::from_level_curve.
  static AlgorithmKind eager_water_filling(PriceSystem f_spec);
  static AlgorithmKind history_pricing_fully(PriceSystem prices);
  static AlgorithmKind history_pricing_general(PriceSystem prices);

  bool price_bearing() const { return prices != nullptr; }
};

// Knobs of a single simulation run.
struct RunConfig {
  // Micro-step of the continuous matching: every selection round matches at
  // most this much before re-picking the cheapest neighbor. Must satisfy
  // 0 < step <= 1e-2.
  double step = 1e-4;
  // Recorded for reproducibility and threaded through by batch drivers. The
  // engine itself is deterministic (ties go to the smallest VertexId).
  std::uint64_t seed = 0;
  // Record a per-vertex snapshot after every event (see RunReport::trace).
  bool record_trace = false;
  // Per-edge matched portions are needed by tests and small experiments but
  // cost memory on instances with millions of edges; large drivers turn
  // this off and the primal falls back to half the level sum.
  bool track_edges = true;
};

// One traced snapshot: a vertex's levels and dual right after an event.
struct TraceRow {
  int event_index = 0;
  VertexId vertex = 0;
  double x_level = 0.0;
  double a_level = 0.0;  // NaN until the vertex's arrival step has run
  double alpha = 0.0;
};

struct RunReport {
  MatchingState final_state;
  double primal = 0.0;
  double dual = 0.0;  // equals primal up to accumulated roundoff
  double offline_opt = 0.0;
  // primal / offline_opt, or 1.0 by convention when offline_opt = 0.
  double ratio = 1.0;
  // Minimum of alpha_u + alpha_v over revealed edges; +inf with no edges.
  double min_edge_dual_slack = std::numeric_limits<double>::infinity();
  // record_trace only: one row per vertex per event, all vertex_count()
  // vertices every time, indexed trace[event_index * vertex_count + vertex].
  // Vertices that have not arrived yet appear with level 0 and NaN a_level.
  std::vector<TraceRow> trace;
};

// Incremental simulator used by the script runners below and, directly, by
// the adaptive hardness constructions that decide future arrivals from the
// current state. Vertices get dense ids in arrival order.
//
// Matching semantics per variant:
//  - arrivals: price-bearing variants repeatedly match a micro-step to the
//    eligible neighbor with the cheapest price while
//    f(x_u) + price(v) stays below 1; Greedy matches maximally to the
//    smallest-id eligible neighbor until the new vertex is full;
//    WaterFilling skips arrival matching in the fully online model (it is
//    the lazy baseline) and fills the new vertex completely in the general
//    arrival model, where arrivals are the only chance to match.
//  - deadlines (fully online only): every variant keeps matching the
//    cheapest eligible neighbor until the vertex is full or none is left.
// Eligibility is a level below 1 at both endpoints; ties break by smallest
// VertexId. The price of v is g(a_v, x_v) for the history variants, f(x_v)
// for eager water-filling, and the water level x_v itself for WaterFilling.
// Greedy has no price notion; its dual updates split matches evenly.
class MatchingEngine {
 public:
  MatchingEngine(Model model, AlgorithmKind algo, const RunConfig& config);

  // Reveals the listed edges (endpoints must have arrived earlier; no
  // duplicates, no self loops), runs the variant's arrival matching, and
  // freezes the arrival level a_u. Returns the new vertex's id.
  VertexId add_arrival(const std::vector<VertexId>& neighbors);

  // Fully online only: runs u's deadline matching. Throws on a general
  // arrival engine, an unknown vertex, or a repeated deadline.
  void add_deadline(VertexId u);

  Model model() const { return model_; }
  const MatchingState& state() const { return state_; }
  // Moves the state out; the engine must not be used afterwards.
  MatchingState release_state() { return std::move(state_); }
  const std::vector<std::vector<VertexId>>& adjacency() const { return adj_; }

  // Adversary hook: raises x(v) without matching anything (no edge, no dual
  // change). Models matched mass carried in from outside the simulated
  // window, e.g. prefilled base vertices of a hardness gadget.
  void force_level(VertexId v, double amount);

 private:
  double selection_key(VertexId v) const;
  void greedy_fill(VertexId u);
  void priced_arrival(VertexId u);
  void continuous_fill(VertexId u);

  Model model_;
  AlgorithmKind algo_;
  RunConfig config_;
  MatchingState state_;
  std::vector<std::vector<VertexId>> adj_;
  // Cached price rows at the frozen levels, filled for history variants.
  std::vector<PriceRow> rows_;
  std::vector<char> deadline_done_;
};

// Replays a validated script through a MatchingEngine and assembles the
// report (offline optimum, ratio, dual slack, optional trace).
// run_fully_online rejects general-arrival scripts and the
// HistoryPricingGeneral variant; run_general_arrival rejects fully online
// scripts and the fully online pricing variants (Greedy and WaterFilling
// run in either model).
RunReport run_fully_online(const InstanceScript& script, const AlgorithmKind& algo,
                           const RunConfig& config);
RunReport run_general_arrival(const InstanceScript& script, const AlgorithmKind& algo,
                              const RunConfig& config);

// Offline fractional matching optimum of the script's static graph.
// Bipartite-hinted scripts that really are two-colorable take the
// augmenting-path route (the fractional and integral optima coincide on
// bipartite graphs); everything else solves the matching LP.
double script_offline_optimum(const InstanceScript& script);

struct BatchItem {
  std::optional<RunReport> report;  // empty when the run failed
  std::string error;                // failure message, empty on success
};

struct BatchResult {
  std::vector<BatchItem> items;  // input order
  // Minima over the successful runs; +inf when there are none.
  double min_ratio = std::numeric_limits<double>::infinity();
  double min_edge_dual_slack = std::numeric_limits<double>::infinity();
};

// Runs every script (dispatching on each script's model), fanning the work
// over at most `parallelism` threads. Reports come back in input order and
// per-script failures land in their slot without aborting the rest.
BatchResult batch_run(const std::vector<InstanceScript>& scripts, const AlgorithmKind& algo,
                      const RunConfig& config, int parallelism = 1);

// Report serialization: scalars plus per-vertex levels and duals, and the
// per-edge matched portions when tracked. Deterministic field order.
std::string run_report_to_json(const RunReport& report);

// Columns: event_index,vertex,x_level,a_level,alpha. A vertex that has not
// arrived yet prints its a_level as nan.
std::string trace_to_csv(const std::vector<TraceRow>& trace);

}  // namespace lm
