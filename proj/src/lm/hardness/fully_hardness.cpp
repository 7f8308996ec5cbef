#include "lm/hardness/fully_hardness.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lm/core/state.hpp"

namespace lm::hardness {
namespace {

void require_split(double alpha, const char* who) {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw std::domain_error(std::string(who) + ": split parameter must lie in [0, 1), got " +
                            std::to_string(alpha));
  }
}

void require_sizes(int n, int ell, const char* who) {
  if (n < 1) {
    throw std::invalid_argument(std::string(who) + ": block size n must be positive");
  }
  if (ell < 1) {
    throw std::invalid_argument(std::string(who) + ": stage count must be positive");
  }
}

int spike_count(int n, double alpha) { return static_cast<int>(std::lround(alpha * n)); }

}  // namespace

double fully_ratio_closed_form(double alpha) {
  require_split(alpha, "fully_ratio_closed_form");
  return alpha +
         (2.0 - alpha) * (1.0 - alpha) / (3.0 - 2.0 * alpha) * (1.0 + std::log1p(-alpha));
}

RatioMinimum fully_minimize_ratio(double tolerance) {
  if (!(tolerance > 0.0)) {
    throw std::invalid_argument("fully_minimize_ratio: tolerance must be positive");
  }
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0;
  double hi = 0.9;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = fully_ratio_closed_form(x1);
  double f2 = fully_ratio_closed_form(x2);
  while (hi - lo > tolerance) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = fully_ratio_closed_form(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = fully_ratio_closed_form(x2);
    }
  }
  RatioMinimum out;
  out.alpha_star = 0.5 * (lo + hi);
  out.value = fully_ratio_closed_form(out.alpha_star);
  return out;
}

double fully_fixed_point(double alpha) {
  require_split(alpha, "fully_fixed_point");
  return (1.0 - alpha) / (3.0 - 2.0 * alpha) * (1.0 + std::log1p(-alpha));
}

RecurrenceResult fully_recurrence(int n, int ell, double alpha) {
  require_sizes(n, ell, "fully_recurrence");
  require_split(alpha, "fully_recurrence");
  const int m = spike_count(n, alpha);
  double harmonic = 0.0;
  for (int i = n - m + 1; i <= n; ++i) harmonic += 1.0 / i;
  const double spread = (1.0 - alpha) / (2.0 - alpha);

  RecurrenceResult out;
  out.x_sequence.reserve(ell);
  out.per_stage_ratios.reserve(ell);
  double x = 0.0;
  for (int k = 0; k < ell; ++k) {
    out.x_sequence.push_back(x);
    const double x_next = (1.0 - (x + harmonic)) * spread;
    out.per_stage_ratios.push_back(alpha + (2.0 - alpha) * x_next);
    x = x_next;
  }
  out.limit_ratio = out.per_stage_ratios.back();
  return out;
}

InstanceScript build_fully_instance(const FullyHardParams& params) {
  require_sizes(params.n, params.ell, "build_fully_instance");
  require_split(params.alpha, "build_fully_instance");
  const int n = params.n;
  const int ell = params.ell;
  const int m = spike_count(n, params.alpha);  // spike and triangle block size
  const int q = n - m;                         // relay and sink block size

  InstanceScript script;
  script.model = Model::FullyOnline;
  script.bipartite_hint = true;
  script.events.reserve(static_cast<size_t>(4) * n * ell);

  VertexId next_id = 0;
  auto arrive_block = [&](int count, std::vector<VertexId> neighbors) {
    // All vertices of one block arrive back to back with the same neighbor
    // list; ids are consecutive, so the caller records only the first.
    const VertexId first = next_id;
    for (int t = 0; t < count; ++t) {
      script.events.push_back({EventKind::Arrival, next_id, neighbors});
      ++next_id;
    }
    return first;
  };
  auto kill_block = [&](VertexId first, int count) {
    for (int t = 0; t < count; ++t) {
      script.events.push_back({EventKind::Deadline, first + t, {}});
    }
  };
  auto id_range = [](VertexId first, int count) {
    std::vector<VertexId> ids(count);
    for (int t = 0; t < count; ++t) ids[t] = first + t;
    return ids;
  };

  // The first stage's triangle and relay blocks open the script with nothing
  // to connect to; every later edge is revealed by its later endpoint.
  VertexId triangle_first = arrive_block(m, {});
  VertexId relay_first = arrive_block(q, {});

  for (int stage = 0; stage < ell; ++stage) {
    const std::vector<VertexId> relays = id_range(relay_first, q);

    // Spikes arrive and die immediately. Spike i sees the triangle vertices
    // from index i on (a nested neighborhood, which is what starves the
    // later triangle vertices) plus every relay.
    for (int i = 0; i < m; ++i) {
      std::vector<VertexId> neighbors;
      neighbors.reserve(static_cast<size_t>(m - i) + q);
      for (int j = i; j < m; ++j) neighbors.push_back(triangle_first + j);
      neighbors.insert(neighbors.end(), relays.begin(), relays.end());
      const VertexId spike = next_id;
      script.events.push_back({EventKind::Arrival, spike, std::move(neighbors)});
      ++next_id;
      script.events.push_back({EventKind::Deadline, spike, {}});
    }

    // The triangle block dies with every neighbor already gone.
    kill_block(triangle_first, m);

    // Sinks and the next stage's blocks arrive, all adjacent to the current
    // relays; the relays then die, pouring their remainder forward, and the
    // sinks die last. The final stage has no successor blocks.
    const VertexId sink_first = arrive_block(q, relays);
    VertexId next_triangle_first = triangle_first;
    VertexId next_relay_first = relay_first;
    if (stage + 1 < ell) {
      next_triangle_first = arrive_block(m, relays);
      next_relay_first = arrive_block(q, relays);
    }
    kill_block(relay_first, q);
    kill_block(sink_first, q);
    triangle_first = next_triangle_first;
    relay_first = next_relay_first;
  }
  return script;
}

double fully_instance_optimum(const FullyHardParams& params) {
  require_sizes(params.n, params.ell, "fully_instance_optimum");
  require_split(params.alpha, "fully_instance_optimum");
  return static_cast<double>(params.n) * params.ell;
}

StagedRunResult run_fully_instance(const FullyHardParams& params, const AlgorithmKind& algo,
                                   const RunConfig& config) {
  const InstanceScript script = build_fully_instance(params);
  MatchingEngine engine(Model::FullyOnline, algo, config);
  for (const Event& event : script.events) {
    if (event.kind == EventKind::Arrival) {
      engine.add_arrival(event.neighbors);
    } else {
      engine.add_deadline(event.vertex);
    }
  }
  const PrimalDualReport report = primal_dual_report(engine.state(), 0.0);
  StagedRunResult out;
  out.primal = report.primal;
  out.dual = report.dual;
  out.optimum = fully_instance_optimum(params);
  out.ratio = out.primal / out.optimum;
  return out;
}

}  // namespace lm::hardness
