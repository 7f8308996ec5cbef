#pragma once

#include <vector>

#include "lm/algorithms/matching_engine.hpp"
#include "lm/core/types.hpp"

namespace lm::hardness {

// Parameters of the staged fully online lower-bound instance. Every stage
// holds 2n vertices in four blocks: a spike block and a triangle block of
// round(alpha * n) vertices each, plus a relay block and a sink block of
// n - round(alpha * n) vertices each. Spikes arrive and die immediately,
// spreading their unit over the shrinking triangle block and the relays;
// relays die last and pour whatever they carry into the sinks and into the
// next stage's triangle and relay blocks, so the stages chain.
struct FullyHardParams {
  int n = 0;         // vertices per block pair (spike+triangle and relay+sink split n)
  int ell = 1;       // number of stages
  double alpha = 0.43;  // fraction of n given to the spike/triangle blocks, in [0, 1)
};

// Limiting competitive ratio of lazy water-filling on the staged instance as
// the stage count grows, as a function of the split parameter:
//   alpha + (2 - alpha)(1 - alpha) / (3 - 2 alpha) * (1 + ln(1 - alpha)).
// Throws std::domain_error outside [0, 1).
double fully_ratio_closed_form(double alpha);

struct RatioMinimum {
  double alpha_star = 0.0;
  double value = 0.0;
};

// Minimizes fully_ratio_closed_form over the bracket [0, 0.9] by golden
// section (the curve is unimodal there: it falls from 2/3 to about 0.6132
// near alpha 0.43 and climbs again). The bracket width shrinks below
// `tolerance`, which must be positive.
RatioMinimum fully_minimize_ratio(double tolerance);

// Fixed point x* of the stage recurrence when both the block size and the
// stage count grow: x* = (1 - alpha) / (3 - 2 alpha) * (1 + ln(1 - alpha)).
// The carried water level entering a stage converges to x*, and the ratio
// closed form equals alpha + (2 - alpha) * x*. Same domain as above.
double fully_fixed_point(double alpha);

struct RecurrenceResult {
  // Water level carried into each stage by the triangle and relay blocks;
  // x_sequence[0] = 0 (nothing is matched before the first stage).
  std::vector<double> x_sequence;
  // Matched mass of each stage divided by the stage's optimum n.
  std::vector<double> per_stage_ratios;
  // The last stage's ratio; with enough stages this is the limiting value
  // alpha + (2 - alpha) * x* up to the finite-n harmonic error.
  double limit_ratio = 0.0;
};

// Exact finite-size stage recurrence of lazy water-filling on the staged
// instance. With m = round(alpha * n) spikes, the spike pass lifts the
// relays by the partial harmonic sum H = 1/n + 1/(n-1) + ... + 1/(n-m+1),
// and the relay pass spreads the remainder over the next stage's blocks:
//   y_k = x_k + H,   x_{k+1} = (1 - y_k) * (1 - alpha) / (2 - alpha),
// with stage ratio alpha + (2 - alpha) * x_{k+1}. The map contracts with
// factor (1 - alpha) / (2 - alpha), so x_k converges geometrically.
RecurrenceResult fully_recurrence(int n, int ell, double alpha);

// Emits the full arrival/deadline event sequence of the staged instance:
// 2 * n * ell vertices, 4 * n * ell events. Per stage: spikes arrive and die
// one by one (each listing the not-yet-spiked triangle vertices and all
// relays), the triangle block dies, the sinks and the next stage's triangle
// and relay blocks arrive (all listing the current relays), the relays die,
// the sinks die. The graph is bipartite: blocks two-color by alternating
// stage parity. The script validates cleanly and admits a perfect matching
// of size n * ell (spike i with triangle vertex i, relays with sinks).
InstanceScript build_fully_instance(const FullyHardParams& params);

// The instance's maximum matching size, n * ell, realized by the explicit
// perfect matching described at build_fully_instance.
double fully_instance_optimum(const FullyHardParams& params);

struct StagedRunResult {
  double primal = 0.0;
  double dual = 0.0;
  double optimum = 0.0;
  double ratio = 0.0;  // primal / optimum
};

// Builds the instance and replays it through the engine, scoring against the
// known perfect matching size instead of recomputing the offline optimum:
// production sizes carry tens of millions of edges, which the generic
// optimum routes cannot afford. Pass track_edges = false in the config at
// those sizes; the per-edge map would dominate memory.
StagedRunResult run_fully_instance(const FullyHardParams& params, const AlgorithmKind& algo,
                                   const RunConfig& config);

}  // namespace lm::hardness
