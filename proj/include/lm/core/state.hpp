#pragma once

#include <cstdint>
#include <limits>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lm/core/types.hpp"

namespace lm {

// Canonical (min,max) edge key packed into one integer.
inline std::uint64_t edge_key(VertexId u, VertexId v) {
  const std::uint64_t lo = static_cast<std::uint32_t>(u < v ? u : v);
  const std::uint64_t hi = static_cast<std::uint32_t>(u < v ? v : u);
  return (lo << 32) | hi;
}

// Fractional matching state plus the dual variables maintained alongside it.
// x_level[v] is the matched portion of v (the water level), a_level[v] the
// level frozen at the end of v's arrival step (pricing history), and alpha[v]
// the dual value accumulated through the price split of every match.
struct MatchingState {
  std::vector<double> x_level;
  std::vector<double> a_level;  // NaN until the vertex's arrival step ends
  std::vector<double> alpha;
  // Edges in reveal order, canonical (min,max) endpoints.
  std::vector<std::pair<VertexId, VertexId>> revealed_edges;
  // Per-edge matched portions, keyed by edge_key(). Optional: very large
  // simulations disable tracking and keep only the levels.
  std::unordered_map<std::uint64_t, double> x_edge;
  bool track_edges = true;

  void add_vertex();
  int vertex_count() const { return static_cast<int>(x_level.size()); }

  double x(VertexId v) const { return x_level[v]; }
  double edge_value(VertexId u, VertexId v) const;
};

// Applies a fractional match of size delta on edge (u,v) and splits the gain
// between the duals: alpha_u += (1-price)*delta, alpha_v += price*delta.
// Throws std::invalid_argument on nonpositive delta or out-of-range price,
// and std::runtime_error if either endpoint's level would exceed 1 + 1e-9.
void apply_match(MatchingState& state, VertexId u, VertexId v, double delta, double price);

struct PrimalDualReport {
  double primal = 0.0;  // total matched portion
  double dual = 0.0;    // sum of alpha
  // Minimum of alpha_u + alpha_v over revealed edges; +inf with no edges.
  double min_edge_dual_slack = std::numeric_limits<double>::infinity();
  // Revealed edges whose dual slack falls below gamma by more than the
  // user-facing tolerance.
  std::vector<std::pair<VertexId, VertexId>> violating_edges;
};

// Evaluates the primal/dual pair against a target competitive ratio gamma,
// scanning state.revealed_edges for the slack minimum. The primal is the sum
// of edge values when tracked, otherwise half the level sum (identical by
// construction since every match raises two levels).
PrimalDualReport primal_dual_report(const MatchingState& state, double gamma);

}  // namespace lm
