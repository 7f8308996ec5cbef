#pragma once

#include <cstdint>

#include "lm/core/types.hpp"

namespace lm {

// Seeded random instance generator shared by the property suites and the
// command line front end. Identical parameters always produce the identical
// script.
struct RandomScriptParams {
  Model model = Model::FullyOnline;
  int min_vertices = 2;
  int max_vertices = 40;
  // Probability of each candidate edge (every pair of distinct vertices, or
  // every cross pair in bipartite mode).
  double edge_probability = 0.3;
  // Sample a random two-coloring and keep only the edges that cross it; the
  // emitted script carries the bipartite hint.
  bool bipartite = false;
  std::uint64_t seed = 0;
};

// Draws the vertex count, the edge set, and (for fully online scripts) an
// interleaved deadline order in which every deadline respects the model's
// constraint of following the arrivals of all its vertex's neighbors. The
// result always passes validate_script.
InstanceScript random_script(const RandomScriptParams& params);

}  // namespace lm
