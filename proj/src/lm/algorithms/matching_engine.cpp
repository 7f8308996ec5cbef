#include "lm/algorithms/matching_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <queue>
#include <stdexcept>
#include <thread>
#include <unordered_set>
#include <utility>

#include "json.hpp"
#include "lm/core/tolerances.hpp"
#include "lm/lp/solve.hpp"

namespace lm {
namespace {

// Levels within this of 1 count as saturated. Keeps eligibility stable under
// the roundoff of many thousands of micro-steps.
constexpr double kLevelEps = 1e-12;

// Arrival matching stops once the combined price reaches 1. The boundary
// itself carries no mass in the continuous process, so the discrete loop
// treats "at 1 up to noise" as stopped; that keeps closed-form cases exact
// (identity prices stop at exactly one half instead of overshooting a step).
constexpr double kPriceGuard = 1e-12;

using MinHeap = std::priority_queue<std::pair<double, VertexId>,
                                    std::vector<std::pair<double, VertexId>>, std::greater<>>;

}  // namespace

std::string to_string(AlgorithmVariant variant) {
  switch (variant) {
    case AlgorithmVariant::Greedy:
      return "greedy";
    case AlgorithmVariant::WaterFilling:
      return "waterfilling";
    case AlgorithmVariant::EagerWaterFilling:
      return "eager_waterfilling";
    case AlgorithmVariant::HistoryPricingFully:
      return "history_fully";
    case AlgorithmVariant::HistoryPricingGeneral:
      return "history_general";
  }
  return "unknown";
}

AlgorithmKind AlgorithmKind::greedy() { return {AlgorithmVariant::Greedy, nullptr}; }

AlgorithmKind AlgorithmKind::water_filling() { return {AlgorithmVariant::WaterFilling, nullptr}; }

AlgorithmKind AlgorithmKind::eager_water_filling(PriceSystem f_spec) {
  return {AlgorithmVariant::EagerWaterFilling,
          std::make_shared<const PriceSystem>(std::move(f_spec))};
}

AlgorithmKind AlgorithmKind::history_pricing_fully(PriceSystem prices) {
  return {AlgorithmVariant::HistoryPricingFully,
          std::make_shared<const PriceSystem>(std::move(prices))};
}

AlgorithmKind AlgorithmKind::history_pricing_general(PriceSystem prices) {
  return {AlgorithmVariant::HistoryPricingGeneral,
          std::make_shared<const PriceSystem>(std::move(prices))};
}

MatchingEngine::MatchingEngine(Model model, AlgorithmKind algo, const RunConfig& config)
    : model_(model), algo_(std::move(algo)), config_(config) {
  if (!(config_.step > 0.0 && config_.step <= 1e-2)) {
    throw std::invalid_argument("matching engine: step must lie in (0, 1e-2]");
  }
  const bool needs_prices = algo_.variant == AlgorithmVariant::EagerWaterFilling ||
                            algo_.variant == AlgorithmVariant::HistoryPricingFully ||
                            algo_.variant == AlgorithmVariant::HistoryPricingGeneral;
  if (needs_prices && !algo_.prices) {
    throw std::invalid_argument("matching engine: variant " + to_string(algo_.variant) +
                                " needs a price system");
  }
  if (model_ == Model::GeneralArrival && (algo_.variant == AlgorithmVariant::HistoryPricingFully ||
                                          algo_.variant == AlgorithmVariant::EagerWaterFilling)) {
    throw std::invalid_argument("matching engine: " + to_string(algo_.variant) +
                                " is a fully online algorithm");
  }
  if (model_ == Model::FullyOnline && algo_.variant == AlgorithmVariant::HistoryPricingGeneral) {
    throw std::invalid_argument("matching engine: " + to_string(algo_.variant) +
                                " is a general arrival algorithm");
  }
  state_.track_edges = config_.track_edges;
}

double MatchingEngine::selection_key(VertexId v) const {
  switch (algo_.variant) {
    case AlgorithmVariant::WaterFilling:
      // The water level doubles as the price: always fill the lowest level.
      return state_.x_level[v];
    case AlgorithmVariant::EagerWaterFilling:
      return algo_.prices->diagonal_inverse(state_.x_level[v]);
    case AlgorithmVariant::HistoryPricingFully:
    case AlgorithmVariant::HistoryPricingGeneral:
      return rows_[v].price_at(state_.x_level[v]);
    case AlgorithmVariant::Greedy:
      break;  // greedy picks by id, never by key
  }
  return 0.0;
}

VertexId MatchingEngine::add_arrival(const std::vector<VertexId>& neighbors) {
  const VertexId u = state_.vertex_count();
  state_.add_vertex();
  adj_.emplace_back();
  rows_.emplace_back();
  deadline_done_.push_back(0);
  std::unordered_set<VertexId> seen;
  for (VertexId v : neighbors) {
    if (v < 0 || v >= u) {
      throw std::invalid_argument("arrival: neighbor " + std::to_string(v) +
                                  " has not arrived before vertex " + std::to_string(u));
    }
    if (!seen.insert(v).second) {
      throw std::invalid_argument("arrival: duplicate neighbor " + std::to_string(v));
    }
    adj_[u].push_back(v);
    adj_[v].push_back(u);
    state_.revealed_edges.emplace_back(std::min(u, v), std::max(u, v));
  }
  switch (algo_.variant) {
    case AlgorithmVariant::Greedy:
      greedy_fill(u);
      break;
    case AlgorithmVariant::WaterFilling:
      // The lazy baseline leaves fully online arrivals unmatched; in the
      // general arrival model the arrival is the only chance to match, so
      // classical water-filling fills the new vertex now.
      if (model_ == Model::GeneralArrival) continuous_fill(u);
      break;
    default:
      priced_arrival(u);
      break;
  }
  state_.a_level[u] = state_.x_level[u];
  if (algo_.variant == AlgorithmVariant::HistoryPricingFully ||
      algo_.variant == AlgorithmVariant::HistoryPricingGeneral) {
    rows_[u] = algo_.prices->price_row(state_.a_level[u]);
  }
  return u;
}

void MatchingEngine::add_deadline(VertexId u) {
  if (model_ != Model::FullyOnline) {
    throw std::invalid_argument("deadline events only exist in the fully online model");
  }
  if (u < 0 || u >= state_.vertex_count()) {
    throw std::invalid_argument("deadline: unknown vertex " + std::to_string(u));
  }
  if (deadline_done_[u]) {
    throw std::invalid_argument("deadline: vertex " + std::to_string(u) +
                                " already had its deadline");
  }
  deadline_done_[u] = 1;
  if (algo_.variant == AlgorithmVariant::Greedy) {
    greedy_fill(u);
  } else {
    continuous_fill(u);
  }
}

void MatchingEngine::force_level(VertexId v, double amount) {
  if (v < 0 || v >= state_.vertex_count()) {
    throw std::invalid_argument("force_level: unknown vertex " + std::to_string(v));
  }
  if (!(amount >= 0.0)) {
    throw std::invalid_argument("force_level: amount must be nonnegative");
  }
  if (state_.x_level[v] + amount > 1.0 + tol::kInvariant) {
    throw std::invalid_argument("force_level: level of vertex " + std::to_string(v) +
                                " would exceed 1");
  }
  state_.x_level[v] += amount;
}

// Matches u maximally to the smallest-id eligible neighbor, repeating until
// u is full or nobody is left. No prices: the dual split is an even half.
void MatchingEngine::greedy_fill(VertexId u) {
  while (state_.x_level[u] < 1.0 - kLevelEps) {
    VertexId best = -1;
    for (VertexId v : adj_[u]) {
      if (state_.x_level[v] < 1.0 - kLevelEps && (best < 0 || v < best)) best = v;
    }
    if (best < 0) break;
    const double delta = std::min(1.0 - state_.x_level[u], 1.0 - state_.x_level[best]);
    apply_match(state_, u, best, delta, 0.5);
  }
}

// Arrival matching of the price-bearing variants: micro-step toward the
// cheapest eligible neighbor while f(x_u) plus that price stays below 1,
// re-selecting after every step. Within one episode only the endpoint just
// matched changes, so a popped heap entry is stale exactly when recomputing
// its key gives a different value.
void MatchingEngine::priced_arrival(VertexId u) {
  MinHeap heap;
  for (VertexId v : adj_[u]) {
    if (state_.x_level[v] < 1.0 - kLevelEps) heap.emplace(selection_key(v), v);
  }
  while (state_.x_level[u] < 1.0 - kLevelEps && !heap.empty()) {
    const auto [key, v] = heap.top();
    heap.pop();
    if (state_.x_level[v] >= 1.0 - kLevelEps) continue;
    const double fresh = selection_key(v);
    if (fresh != key) {
      heap.emplace(fresh, v);
      continue;
    }
    const double fu = algo_.prices->diagonal_inverse(state_.x_level[u]);
    if (!(fu + key < 1.0 - kPriceGuard)) break;  // cheapest already prices out
    const double delta =
        std::min({config_.step, 1.0 - state_.x_level[u], 1.0 - state_.x_level[v]});
    apply_match(state_, u, v, delta, key);
    if (state_.x_level[v] < 1.0 - kLevelEps) heap.emplace(selection_key(v), v);
  }
}

// Unconditional fill toward the cheapest eligible neighbor until u is full
// or none is left: deadline matching, and water-filling's arrival step in
// the general arrival model. The dual price of each step is the selection
// key (the current price of the passive endpoint).
void MatchingEngine::continuous_fill(VertexId u) {
  MinHeap heap;
  for (VertexId v : adj_[u]) {
    if (state_.x_level[v] < 1.0 - kLevelEps) heap.emplace(selection_key(v), v);
  }
  while (state_.x_level[u] < 1.0 - kLevelEps && !heap.empty()) {
    const auto [key, v] = heap.top();
    heap.pop();
    if (state_.x_level[v] >= 1.0 - kLevelEps) continue;
    const double fresh = selection_key(v);
    if (fresh != key) {
      heap.emplace(fresh, v);
      continue;
    }
    const double delta =
        std::min({config_.step, 1.0 - state_.x_level[u], 1.0 - state_.x_level[v]});
    apply_match(state_, u, v, delta, key);
    if (state_.x_level[v] < 1.0 - kLevelEps) heap.emplace(selection_key(v), v);
  }
}

namespace {

void append_snapshot(std::vector<TraceRow>& trace, const MatchingState& state, int event_index,
                     int total_vertices) {
  const int arrived = state.vertex_count();
  for (VertexId v = 0; v < total_vertices; ++v) {
    TraceRow row;
    row.event_index = event_index;
    row.vertex = v;
    if (v < arrived) {
      row.x_level = state.x_level[v];
      row.a_level = state.a_level[v];
      row.alpha = state.alpha[v];
    } else {
      row.a_level = std::numeric_limits<double>::quiet_NaN();
    }
    trace.push_back(row);
  }
}

RunReport run_script(const InstanceScript& script, const AlgorithmKind& algo,
                     const RunConfig& config) {
  require_valid(script);
  MatchingEngine engine(script.model, algo, config);
  RunReport report;
  const int total = script.vertex_count();
  if (config.record_trace) report.trace.reserve(script.events.size() * total);
  for (size_t e = 0; e < script.events.size(); ++e) {
    const Event& event = script.events[e];
    if (event.kind == EventKind::Arrival) {
      engine.add_arrival(event.neighbors);
    } else {
      engine.add_deadline(event.vertex);
    }
    if (config.record_trace) {
      append_snapshot(report.trace, engine.state(), static_cast<int>(e), total);
    }
  }
  report.offline_opt = script_offline_optimum(script);
  const PrimalDualReport pd = primal_dual_report(engine.state(), 0.0);
  report.primal = pd.primal;
  report.dual = pd.dual;
  report.min_edge_dual_slack = pd.min_edge_dual_slack;
  report.ratio = report.offline_opt > 0.0 ? report.primal / report.offline_opt : 1.0;
  report.final_state = engine.release_state();
  return report;
}

// Two-coloring of the union graph; empty when an odd cycle shows up.
std::optional<std::vector<int>> two_color(int vertex_count,
                                          const std::vector<std::pair<VertexId, VertexId>>& edges) {
  std::vector<std::vector<int>> adj(vertex_count);
  for (const auto& [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  std::vector<int> color(vertex_count, -1);
  std::vector<int> queue;
  for (int start = 0; start < vertex_count; ++start) {
    if (color[start] != -1) continue;
    color[start] = 0;
    queue.assign(1, start);
    for (size_t head = 0; head < queue.size(); ++head) {
      const int w = queue[head];
      for (int z : adj[w]) {
        if (color[z] == -1) {
          color[z] = color[w] ^ 1;
          queue.push_back(z);
        } else if (color[z] == color[w]) {
          return std::nullopt;
        }
      }
    }
  }
  return color;
}

// Hopcroft-Karp maximum matching; left side = color 0.
int max_bipartite_matching(int vertex_count, const std::vector<int>& color,
                           const std::vector<std::pair<VertexId, VertexId>>& edges) {
  std::vector<std::vector<int>> out(vertex_count);
  for (const auto& [u, v] : edges) {
    const int l = color[u] == 0 ? u : v;
    const int r = color[u] == 0 ? v : u;
    out[l].push_back(r);
  }
  constexpr int kUnreached = std::numeric_limits<int>::max();
  std::vector<int> match(vertex_count, -1);
  std::vector<int> dist(vertex_count, kUnreached);
  std::vector<int> frontier;

  const auto bfs = [&]() {
    frontier.clear();
    for (int v = 0; v < vertex_count; ++v) {
      dist[v] = kUnreached;
      if (color[v] == 0 && match[v] < 0 && !out[v].empty()) {
        dist[v] = 0;
        frontier.push_back(v);
      }
    }
    bool found_free_right = false;
    for (size_t head = 0; head < frontier.size(); ++head) {
      const int l = frontier[head];
      for (int r : out[l]) {
        const int next = match[r];
        if (next < 0) {
          found_free_right = true;
        } else if (dist[next] == kUnreached) {
          dist[next] = dist[l] + 1;
          frontier.push_back(next);
        }
      }
    }
    return found_free_right;
  };
  const std::function<bool(int)> augment = [&](int l) {
    for (int r : out[l]) {
      const int next = match[r];
      if (next < 0 || (dist[next] == dist[l] + 1 && augment(next))) {
        match[l] = r;
        match[r] = l;
        return true;
      }
    }
    dist[l] = kUnreached;
    return false;
  };

  int size = 0;
  while (bfs()) {
    for (int v = 0; v < vertex_count; ++v) {
      if (color[v] == 0 && match[v] < 0 && !out[v].empty() && augment(v)) ++size;
    }
  }
  return size;
}

}  // namespace

RunReport run_fully_online(const InstanceScript& script, const AlgorithmKind& algo,
                           const RunConfig& config) {
  if (script.model != Model::FullyOnline) {
    throw std::invalid_argument("run_fully_online: script is a general arrival script");
  }
  return run_script(script, algo, config);
}

RunReport run_general_arrival(const InstanceScript& script, const AlgorithmKind& algo,
                              const RunConfig& config) {
  if (script.model != Model::GeneralArrival) {
    throw std::invalid_argument("run_general_arrival: script is a fully online script");
  }
  return run_script(script, algo, config);
}

double script_offline_optimum(const InstanceScript& script) {
  const auto edges = script_edges(script);
  if (edges.empty()) return 0.0;
  if (script.bipartite_hint) {
    if (const auto color = two_color(script.vertex_count(), edges)) {
      return max_bipartite_matching(script.vertex_count(), *color, edges);
    }
  }
  return lp::offline_fractional_optimum(edges);
}

BatchResult batch_run(const std::vector<InstanceScript>& scripts, const AlgorithmKind& algo,
                      const RunConfig& config, int parallelism) {
  if (parallelism < 1) {
    throw std::invalid_argument("batch_run: parallelism must be at least 1");
  }
  BatchResult result;
  result.items.resize(scripts.size());
  std::atomic<size_t> cursor{0};
  const auto worker = [&]() {
    for (size_t i; (i = cursor.fetch_add(1)) < scripts.size();) {
      try {
        result.items[i].report = scripts[i].model == Model::FullyOnline
                                     ? run_fully_online(scripts[i], algo, config)
                                     : run_general_arrival(scripts[i], algo, config);
      } catch (const std::exception& err) {
        result.items[i].error = err.what();
      }
    }
  };
  const size_t workers = std::min<size_t>(parallelism, std::max<size_t>(scripts.size(), 1));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& thread : pool) thread.join();
  }
  for (const BatchItem& item : result.items) {
    if (!item.report) continue;
    result.min_ratio = std::min(result.min_ratio, item.report->ratio);
    result.min_edge_dual_slack =
        std::min(result.min_edge_dual_slack, item.report->min_edge_dual_slack);
  }
  return result;
}

std::string run_report_to_json(const RunReport& report) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["primal"] = report.primal;
  doc["dual"] = report.dual;
  doc["offline_opt"] = report.offline_opt;
  doc["ratio"] = report.ratio;
  doc["min_edge_dual_slack"] = std::isfinite(report.min_edge_dual_slack)
                                   ? ordered_json(report.min_edge_dual_slack)
                                   : ordered_json(nullptr);
  const MatchingState& state = report.final_state;
  doc["vertices"] = ordered_json::array();
  for (int v = 0; v < state.vertex_count(); ++v) {
    ordered_json entry;
    entry["x"] = state.x_level[v];
    entry["a"] =
        std::isnan(state.a_level[v]) ? ordered_json(nullptr) : ordered_json(state.a_level[v]);
    entry["alpha"] = state.alpha[v];
    doc["vertices"].push_back(std::move(entry));
  }
  if (state.track_edges) {
    doc["edges"] = ordered_json::array();
    for (const auto& [u, v] : state.revealed_edges) {
      doc["edges"].push_back(ordered_json::array({u, v, state.edge_value(u, v)}));
    }
  }
  return doc.dump(2) + "\n";
}

std::string trace_to_csv(const std::vector<TraceRow>& trace) {
  std::string out = "event_index,vertex,x_level,a_level,alpha\n";
  char line[160];
  for (const TraceRow& row : trace) {
    std::snprintf(line, sizeof line, "%d,%d,%.17g,%.17g,%.17g\n", row.event_index, row.vertex,
                  row.x_level, row.a_level, row.alpha);
    out += line;
  }
  return out;
}

}  // namespace lm
