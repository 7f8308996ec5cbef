#pragma once

#include <limits>
#include <string>
#include <vector>

#include "lm/algorithms/matching_engine.hpp"

namespace lm::hardness {

// Parameters of the three-stage adaptive lower-bound game for the general
// arrival model. The game opens with a complete bipartite phase of n*k
// vertices (so n*k must be even), then runs n steps that each add a block of
// k arrivals against the still-undecided base vertices and peel off the k
// least matched of them, and finally attacks the blocks whose matched
// portions fell short of the target with shrinking-neighborhood arrivals.
struct GeneralHardParams {
  int n = 0;  // second-stage steps
  int k = 0;  // vertices per block
  // Reference opening portion, recorded in reports and used by companion
  // profile solves; the game itself measures the opening portion it gets.
  double gamma = 0.0;
  // Ratio target the game tries to refute. The game ends after the opening
  // stage when the measured portion stays below it.
  double capital_gamma = 0.0;
};

// Matched-portion profile of the best algorithm that defends ratio
// capital_gamma through the second stage, given opening portion gamma.
struct AlphaBetaSolution {
  double gamma = 0.0;
  std::vector<double> alphas;  // peeled base blocks, step by step; nondecreasing
  std::vector<double> betas;   // arriving blocks, step by step; nonincreasing
  double ratio = 0.0;          // (n * gamma + 2 * sum(betas)) / (2n)
};

// Extra matching any algorithm can still collect from a block of k vertices
// already matched to an average portion a when the block is attacked by
// shrinking-neighborhood arrivals: 1 - e^(a-1). Decreasing in a; 1 - 1/e at
// a = 0 and 0 at a = 1.
double triangle_bound(double a);

// Plays that attack. k base vertices arrive isolated and are prefilled to a
// uniform level; k attackers then arrive one by one, each adjacent to every
// base vertex not yet peeled, and after each arrival the least matched
// remaining base vertex (ties to the smallest id) is peeled out of all later
// neighborhoods. Returns the total matching the attackers collect; divided
// by k it approaches triangle_bound(prefill) for water-filling, with
// O(1/k + step) discretization slack.
double simulate_upper_triangle(int k, double prefill, const AlgorithmKind& algo,
                               const RunConfig& config);

// Computes the best defendable profile step by step. Entering step i with
// the peeled portion at alpha_{i-1} (alpha_0 = gamma), the step's arrival
// portion beta_i solves
//   e^(alpha_{i-1} + x / (n-i+1) - 1) + e^(x-1) = 2 - capital_gamma,
// the level where the two follow-up attacks on the step's blocks together
// extract exactly capital_gamma; the left side is strictly increasing, so a
// positive root is found by bisection to 1e-12 and no positive root means
// the step matches nothing (beta_i = 0). The root is capped at
// (n-i+1) * (1 - alpha_{i-1}), the mass that saturates every remaining base
// vertex. Requires n >= 1, capital_gamma in (0, 1], gamma in
// [capital_gamma, 1].
AlphaBetaSolution solve_alpha_beta(int n, double capital_gamma, double gamma);

struct SweepPoint {
  double gamma = 0.0;
  double r = 0.0;
};

struct SweepResult {
  double capital_gamma = 0.0;
  std::vector<SweepPoint> r_curve;  // r(gamma) over [capital_gamma, 1]
  double max_r = 0.0;
  // True when max_r < capital_gamma: no opening portion lets an algorithm
  // defend the target, refuting ratios above it.
  bool pass = false;
  // Forward-difference estimate of dr/dgamma at gamma = capital_gamma,
  // reported so the grid step's adequacy near the fixed point of r can be
  // judged; 0 when the curve has fewer than two points.
  double derivative_near_target = 0.0;
};

// Evaluates r(gamma) = solve_alpha_beta(n, capital_gamma, gamma).ratio over
// the grid capital_gamma, capital_gamma + grid_step, ..., plus the exact
// endpoint 1. Grid points are independent, so they fan out over at most
// `parallelism` threads.
SweepResult general_hardness_sweep(int n, double capital_gamma, double grid_step,
                                   int parallelism = 1);

// Plot data for the sweep: header "gamma,r", one row per grid point, full
// double precision.
std::string sweep_to_csv(const SweepResult& sweep);

// Slack report of the feasibility system a capital_gamma-competitive
// algorithm's profile must satisfy. Every slack is oriented so nonnegative
// means the constraint holds.
struct P1Report {
  // gamma - capital_gamma: the opening stage alone must reach the target.
  double gamma_slack = 0.0;
  // sum(alpha_i + beta_i) - 2 n capital_gamma - 2 sum(penalty_i) with
  // penalty_i = max(0, capital_gamma - triangle_bound(alpha_i)
  //                   - triangle_bound(beta_i)):
  // the second stage must carry the target on its own blocks, prepaying
  // whatever the follow-up attacks can no longer extract.
  double matched_mass_slack = 0.0;
  // Step i peels the least matched k-block at alpha_i, so every block still
  // unpeeled is at least that matched; what that forces,
  // sum_{j<i} alpha_j + (n-i+1) alpha_i, can never exceed what has been
  // paid in, sum_{j<=i} beta_j + n gamma. One slack per step.
  std::vector<double> prefix_slacks;
  // sum(alpha) - n gamma - sum(beta): the base side ends at least as matched
  // as the opening plus the arrivals put in.
  double sum_slack = 0.0;
  // Minimum consecutive alpha increase (the peeled portions cannot drop:
  // each step peels the minimum of a shrinking set that only rises).
  double alpha_step_min = std::numeric_limits<double>::infinity();
  // Minimum consecutive beta decrease (best profiles front-load arrivals).
  double beta_step_min = std::numeric_limits<double>::infinity();
  // Minimum distance of gamma and every alpha, beta from the [0, 1] walls;
  // negative when a value escapes the unit interval.
  double range_slack = std::numeric_limits<double>::infinity();
  // All of the above at least -1e-9.
  bool feasible = false;
};

P1Report check_p1_constraints(const AlphaBetaSolution& sol, double capital_gamma);

struct AdversaryResult {
  GeneralHardParams params;
  // 1 when the game ended right after the opening stage, 3 after a full run
  // (the attack list may still be empty).
  int stage_stopped = 1;
  double gamma_observed = 0.0;
  std::vector<double> alphas;        // empty when stage_stopped = 1
  std::vector<double> betas;
  std::vector<int> penalized_steps;  // 1-based steps whose blocks were attacked
  // Known maximum matching of the revealed graph: (n + |attacked|) * k for a
  // full run, n * k / 2 when the game ends at the opening stage.
  double optimum = 0.0;
  double primal = 0.0;
  double dual = 0.0;
  double observed_ratio = 0.0;       // primal / optimum
  double error_budget = 0.0;         // 1/k + step, the finite-game slack
};

// Plays the three-stage game against the plugged algorithm. Opening stage:
// n*k vertices arrive alternating sides of a complete bipartite graph, each
// listing all earlier vertices of the other side; the average level gamma is
// measured, and the game ends if it falls below capital_gamma. Second stage,
// step i: k arrivals all adjacent to every base vertex still unpeeled, then
// the k least matched unpeeled base vertices (ties to smaller id) are peeled
// and their average becomes alpha_i; the arrivals' average becomes beta_i.
// Third stage: every step whose triangle_bound(alpha_i) + triangle_bound(
// beta_i) falls below capital_gamma has both its blocks attacked with
// shrinking-neighborhood arrivals. Throws the engine's model mismatch error
// for fully online algorithm variants.
AdversaryResult run_adaptive_general_adversary(const GeneralHardParams& params,
                                               const AlgorithmKind& algo,
                                               const RunConfig& config);

// Game transcript: parameters, stage reached, measured portions, attacked
// steps, and the final score, as pretty-printed JSON.
std::string adversary_result_to_json(const AdversaryResult& result);

}  // namespace lm::hardness
