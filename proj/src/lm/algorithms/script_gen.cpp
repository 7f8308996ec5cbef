#include "lm/algorithms/script_gen.hpp"

#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace lm {
namespace {

// Uniform double in [0, 1) built from the raw engine words, so the stream is
// identical across standard libraries (the distribution classes are
// implementation defined).
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

int pick(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

}  // namespace

InstanceScript random_script(const RandomScriptParams& params) {
  if (params.min_vertices < 1 || params.min_vertices > params.max_vertices) {
    throw std::invalid_argument("random_script: need 1 <= min_vertices <= max_vertices");
  }
  if (!(params.edge_probability >= 0.0 && params.edge_probability <= 1.0)) {
    throw std::invalid_argument("random_script: edge_probability must lie in [0, 1]");
  }
  std::mt19937_64 rng(params.seed);
  const int n = pick(rng, params.min_vertices, params.max_vertices);

  std::vector<int> side(n, 0);
  if (params.bipartite) {
    for (int v = 0; v < n; ++v) side[v] = static_cast<int>(rng() & 1);
  }

  // All edges are drawn up front: neighbors[j] lists the earlier endpoints
  // revealed at j's arrival, and last_contact[v] ends up as the arrival
  // after which v's neighborhood is complete.
  std::vector<std::vector<VertexId>> neighbors(n);
  std::vector<int> last_contact(n);
  for (int v = 0; v < n; ++v) last_contact[v] = v;
  for (int j = 1; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      if (params.bipartite && side[i] == side[j]) continue;
      if (unit(rng) < params.edge_probability) {
        neighbors[j].push_back(i);
        last_contact[i] = j;
      }
    }
  }

  InstanceScript script;
  script.model = params.model;
  script.bipartite_hint = params.bipartite;
  if (params.model == Model::GeneralArrival) {
    for (int j = 0; j < n; ++j) {
      script.events.push_back({EventKind::Arrival, j, neighbors[j]});
    }
    require_valid(script);
    return script;
  }

  // Fully online: a deadline may fire any time after the vertex's final edge
  // reveal. After each arrival the newly completed vertices join a pending
  // pool and a random-length prefix of it fires immediately; whatever is
  // left fires after the last arrival, in random order.
  std::vector<VertexId> pending;
  const auto pop_random_pending = [&]() {
    const size_t k = static_cast<size_t>(rng() % pending.size());
    std::swap(pending[k], pending.back());
    const VertexId v = pending.back();
    pending.pop_back();
    return v;
  };
  for (int j = 0; j < n; ++j) {
    script.events.push_back({EventKind::Arrival, j, neighbors[j]});
    for (int v = 0; v <= j; ++v) {
      if (last_contact[v] == j) pending.push_back(v);
    }
    while (!pending.empty() && unit(rng) < 0.5) {
      script.events.push_back({EventKind::Deadline, pop_random_pending(), {}});
    }
  }
  while (!pending.empty()) {
    script.events.push_back({EventKind::Deadline, pop_random_pending(), {}});
  }
  require_valid(script);
  return script;
}

}  // namespace lm
