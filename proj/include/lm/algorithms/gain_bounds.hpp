#pragma once

#include "lm/algorithms/matching_engine.hpp"
#include "lm/core/types.hpp"
#include "lm/pricing/price_system.hpp"

namespace lm {

struct GainCheckReport {
  int pairs_checked = 0;
  // Minimum over all checked pairs of (alpha_u + alpha_v) - bound; +inf when
  // nothing was checked. The discrete engine can undershoot the continuous
  // bound by an O(step) amount, so callers compare against a small negative
  // tolerance rather than zero.
  double min_slack = std::numeric_limits<double>::infinity();
  VertexId worst_u = -1;
  VertexId worst_v = -1;
};

// Empirical verification of the per-pair dual gain guarantees of the
// history-based pricing algorithms, evaluated from a recorded trace (run
// with record_trace = true; throws std::invalid_argument otherwise).
//
// Fully online scripts: each edge is checked once, at its earlier endpoint's
// deadline. With u the endpoint whose deadline comes first, p_u its level
// right before that deadline and p_v the other endpoint's level right after
// it, the duals right after the deadline must satisfy
//   alpha_u + alpha_v >= a_u f(a_u) + integral_{a_u}^{p_u} g(a_u, x) dx
//                      + a_v f(a_v) + integral_{a_v}^{p_v} g(a_v, x) dx
//                      + (1 - p_u)(1 - g(a_v, p_v)).
// General arrival scripts: each edge is checked once, right after its later
// endpoint u arrives, with p_v the neighbor's level at that moment:
//   alpha_u + alpha_v >= a_v f(a_v) + integral_{a_v}^{p_v} g(a_v, x) dx
//                      + a_u f(a_u).
// The integrals are evaluated exactly through the substitution that turns
// a f(a) + integral_a^p g(a, x) dx into H(f(a), g(a, p)) on the grid.
GainCheckReport check_gain_bounds(const InstanceScript& script, const RunReport& report,
                                  const PriceSystem& prices);

}  // namespace lm
