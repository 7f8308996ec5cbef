#include "lm/core/state.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "lm/core/tolerances.hpp"

namespace lm {

void MatchingState::add_vertex() {
  x_level.push_back(0.0);
  a_level.push_back(std::numeric_limits<double>::quiet_NaN());
  alpha.push_back(0.0);
}

double MatchingState::edge_value(VertexId u, VertexId v) const {
  auto it = x_edge.find(edge_key(u, v));
  return it == x_edge.end() ? 0.0 : it->second;
}

void apply_match(MatchingState& state, VertexId u, VertexId v, double delta, double price) {
  if (!(delta > 0.0)) {
    throw std::invalid_argument("apply_match: delta must be positive");
  }
  if (!(price >= 0.0 && price <= 1.0)) {
    throw std::invalid_argument("apply_match: price must lie in [0,1]");
  }
  if (u == v || u < 0 || v < 0 || u >= state.vertex_count() || v >= state.vertex_count()) {
    throw std::invalid_argument("apply_match: endpoints must be two distinct known vertices");
  }
  for (VertexId w : {u, v}) {
    if (state.x_level[w] + delta > 1.0 + tol::kInvariant) {
      std::ostringstream out;
      out << "apply_match: water level of vertex " << w << " would reach "
          << state.x_level[w] + delta;
      throw std::runtime_error(out.str());
    }
  }
  state.x_level[u] += delta;
  state.x_level[v] += delta;
  state.alpha[u] += (1.0 - price) * delta;
  state.alpha[v] += price * delta;
  if (state.track_edges) {
    state.x_edge[edge_key(u, v)] += delta;
  }
}

PrimalDualReport primal_dual_report(const MatchingState& state, double gamma) {
  PrimalDualReport report;
  if (state.track_edges) {
    for (const auto& [key, value] : state.x_edge) {
      (void)key;
      report.primal += value;
    }
  } else {
    double level_sum = 0.0;
    for (double x : state.x_level) level_sum += x;
    report.primal = level_sum / 2.0;
  }
  for (double a : state.alpha) report.dual += a;

  for (const auto& [u, v] : state.revealed_edges) {
    const double slack = state.alpha[u] + state.alpha[v];
    if (slack < report.min_edge_dual_slack) report.min_edge_dual_slack = slack;
    if (slack < gamma - tol::kUserFacing) report.violating_edges.emplace_back(u, v);
  }
  return report;
}

}  // namespace lm
