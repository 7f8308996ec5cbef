#include "lm/hardness/general_hardness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"
#include "lm/core/state.hpp"
#include "lm/core/tolerances.hpp"

namespace lm::hardness {
namespace {

void require_solver_inputs(int n, double capital_gamma, const char* who) {
  if (n < 1) {
    throw std::invalid_argument(std::string(who) + ": step count n must be positive");
  }
  if (!(capital_gamma > 0.0 && capital_gamma <= 1.0)) {
    throw std::invalid_argument(std::string(who) + ": target ratio must lie in (0, 1]");
  }
}

// One shrinking-neighborhood attack: |alive| arrivals, each adjacent to the
// base vertices not yet peeled, peeling the least matched one (ties to the
// smallest id) after every arrival. Returns the mass the attackers collect.
double attack_block(MatchingEngine& engine, std::vector<VertexId> alive) {
  double total = 0.0;
  const int rounds = static_cast<int>(alive.size());
  for (int j = 0; j < rounds; ++j) {
    const VertexId attacker = engine.add_arrival(alive);
    // Nothing arriving later lists the attacker, so its level is final.
    total += engine.state().x_level[attacker];
    size_t weakest = 0;
    for (size_t t = 1; t < alive.size(); ++t) {
      if (engine.state().x_level[alive[t]] < engine.state().x_level[alive[weakest]]) weakest = t;
    }
    alive.erase(alive.begin() + weakest);
  }
  return total;
}

double mean_level(const MatchingState& state, const std::vector<VertexId>& ids) {
  double sum = 0.0;
  for (VertexId v : ids) sum += state.x_level[v];
  return ids.empty() ? 0.0 : sum / static_cast<double>(ids.size());
}

}  // namespace

double triangle_bound(double a) { return -std::expm1(a - 1.0); }

double simulate_upper_triangle(int k, double prefill, const AlgorithmKind& algo,
                               const RunConfig& config) {
  if (k < 1) throw std::invalid_argument("simulate_upper_triangle: block size must be positive");
  if (!(prefill >= 0.0 && prefill <= 1.0)) {
    throw std::invalid_argument("simulate_upper_triangle: prefill must lie in [0, 1]");
  }
  MatchingEngine engine(Model::GeneralArrival, algo, config);
  std::vector<VertexId> base(k);
  for (int v = 0; v < k; ++v) {
    base[v] = engine.add_arrival({});
    if (prefill > 0.0) engine.force_level(base[v], prefill);
  }
  return attack_block(engine, std::move(base));
}

AlphaBetaSolution solve_alpha_beta(int n, double capital_gamma, double gamma) {
  require_solver_inputs(n, capital_gamma, "solve_alpha_beta");
  if (!(gamma >= capital_gamma && gamma <= 1.0)) {
    throw std::invalid_argument(
        "solve_alpha_beta: opening portion must lie in [target ratio, 1]");
  }
  AlphaBetaSolution sol;
  sol.gamma = gamma;
  sol.alphas.reserve(n);
  sol.betas.reserve(n);
  const double stop_level = 2.0 - capital_gamma;
  double alpha_prev = gamma;
  double beta_sum = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double r = static_cast<double>(n - i + 1);
    // Strictly increasing in x; equals stop_level when the follow-up attacks
    // on this step's two blocks together extract exactly the target.
    auto attacked_mass = [&](double x) {
      return std::exp(alpha_prev + x / r - 1.0) + std::exp(x - 1.0);
    };
    double beta = 0.0;
    if (attacked_mass(0.0) < stop_level) {
      double lo = 0.0;
      double hi = 1.0;
      while (attacked_mass(hi) < stop_level) hi *= 2.0;
      while (hi - lo > tol::kHardnessRoot) {
        const double mid = 0.5 * (lo + hi);
        (attacked_mass(mid) < stop_level ? lo : hi) = mid;
      }
      beta = 0.5 * (lo + hi);
    }
    // A step cannot push the remaining base blocks past level 1.
    beta = std::min(beta, r * (1.0 - alpha_prev));
    // Keeping every prefix constraint tight forces this update: subtracting
    // consecutive tight instances of
    //   sum_{j<i} alpha_j + (n-i+1) alpha_i = sum_{j<=i} beta_j + n gamma
    // leaves (n-i+1)(alpha_i - alpha_{i-1}) = beta_i.
    const double alpha_i = alpha_prev + beta / r;
    sol.alphas.push_back(alpha_i);
    sol.betas.push_back(beta);
    beta_sum += beta;
    alpha_prev = alpha_i;
  }
  sol.ratio = (n * gamma + 2.0 * beta_sum) / (2.0 * n);
  return sol;
}

SweepResult general_hardness_sweep(int n, double capital_gamma, double grid_step,
                                   int parallelism) {
  require_solver_inputs(n, capital_gamma, "general_hardness_sweep");
  if (!(grid_step > 0.0)) {
    throw std::invalid_argument("general_hardness_sweep: grid step must be positive");
  }
  if (parallelism < 1) {
    throw std::invalid_argument("general_hardness_sweep: parallelism must be at least 1");
  }
  std::vector<double> gammas;
  for (int j = 0;; ++j) {
    const double g = capital_gamma + j * grid_step;
    if (g >= 1.0 - 1e-12) break;
    gammas.push_back(g);
  }
  gammas.push_back(1.0);

  std::vector<double> rs(gammas.size());
  std::atomic<size_t> cursor{0};
  auto worker = [&] {
    for (size_t i = cursor.fetch_add(1); i < gammas.size(); i = cursor.fetch_add(1)) {
      rs[i] = solve_alpha_beta(n, capital_gamma, gammas[i]).ratio;
    }
  };
  const int threads = std::min<int>(parallelism, static_cast<int>(gammas.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  SweepResult out;
  out.capital_gamma = capital_gamma;
  out.r_curve.reserve(gammas.size());
  out.max_r = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < gammas.size(); ++i) {
    out.r_curve.push_back({gammas[i], rs[i]});
    out.max_r = std::max(out.max_r, rs[i]);
  }
  out.pass = out.max_r < capital_gamma;
  if (out.r_curve.size() >= 2) {
    out.derivative_near_target =
        (out.r_curve[1].r - out.r_curve[0].r) / (out.r_curve[1].gamma - out.r_curve[0].gamma);
  }
  return out;
}

std::string sweep_to_csv(const SweepResult& sweep) {
  std::string out = "gamma,r\n";
  char line[80];
  for (const SweepPoint& point : sweep.r_curve) {
    std::snprintf(line, sizeof line, "%.17g,%.17g\n", point.gamma, point.r);
    out += line;
  }
  return out;
}

P1Report check_p1_constraints(const AlphaBetaSolution& sol, double capital_gamma) {
  const size_t n = sol.alphas.size();
  if (sol.betas.size() != n) {
    throw std::invalid_argument("check_p1_constraints: alpha and beta lengths differ");
  }
  P1Report report;
  report.gamma_slack = sol.gamma - capital_gamma;

  double alpha_sum = 0.0;
  double beta_sum = 0.0;
  double penalty_sum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    alpha_sum += sol.alphas[i];
    beta_sum += sol.betas[i];
    penalty_sum += std::max(
        0.0, capital_gamma - triangle_bound(sol.alphas[i]) - triangle_bound(sol.betas[i]));
  }
  report.matched_mass_slack =
      alpha_sum + beta_sum - 2.0 * capital_gamma * static_cast<double>(n) - 2.0 * penalty_sum;

  report.prefix_slacks.reserve(n);
  double prefix_alpha = 0.0;
  double prefix_beta = 0.0;
  for (size_t i = 0; i < n; ++i) {
    prefix_beta += sol.betas[i];
    const double forced = prefix_alpha + static_cast<double>(n - i) * sol.alphas[i];
    const double paid = prefix_beta + static_cast<double>(n) * sol.gamma;
    report.prefix_slacks.push_back(paid - forced);
    prefix_alpha += sol.alphas[i];
  }
  report.sum_slack = alpha_sum - static_cast<double>(n) * sol.gamma - beta_sum;

  for (size_t i = 1; i < n; ++i) {
    report.alpha_step_min = std::min(report.alpha_step_min, sol.alphas[i] - sol.alphas[i - 1]);
    report.beta_step_min = std::min(report.beta_step_min, sol.betas[i - 1] - sol.betas[i]);
  }
  auto wall_distance = [](double v) { return std::min(v, 1.0 - v); };
  report.range_slack = wall_distance(sol.gamma);
  for (size_t i = 0; i < n; ++i) {
    report.range_slack = std::min(report.range_slack, wall_distance(sol.alphas[i]));
    report.range_slack = std::min(report.range_slack, wall_distance(sol.betas[i]));
  }

  double worst = std::min({report.gamma_slack, report.matched_mass_slack, report.sum_slack,
                           report.alpha_step_min, report.beta_step_min, report.range_slack});
  for (double slack : report.prefix_slacks) worst = std::min(worst, slack);
  report.feasible = worst >= -tol::kInvariant;
  return report;
}

AdversaryResult run_adaptive_general_adversary(const GeneralHardParams& params,
                                               const AlgorithmKind& algo,
                                               const RunConfig& config) {
  if (params.n < 1 || params.k < 1) {
    throw std::invalid_argument("run_adaptive_general_adversary: n and k must be positive");
  }
  if (!(params.gamma >= 0.0 && params.gamma <= 1.0)) {
    throw std::invalid_argument(
        "run_adaptive_general_adversary: reference portion must lie in [0, 1]");
  }
  if (!(params.capital_gamma >= 0.0 && params.capital_gamma <= 1.0)) {
    throw std::invalid_argument(
        "run_adaptive_general_adversary: target ratio must lie in [0, 1]");
  }
  if ((static_cast<long long>(params.n) * params.k) % 2 != 0) {
    throw std::invalid_argument(
        "run_adaptive_general_adversary: n * k must be even to split the opening stage");
  }
  MatchingEngine engine(Model::GeneralArrival, algo, config);
  const int base_count = params.n * params.k;

  AdversaryResult out;
  out.params = params;
  out.error_budget = 1.0 / params.k + config.step;

  // Opening stage: a complete bipartite graph revealed one vertex at a time,
  // sides alternating with arrival order.
  std::vector<VertexId> side[2];
  for (int t = 0; t < base_count; ++t) {
    engine.add_arrival(side[1 - (t & 1)]);
    side[t & 1].push_back(t);
  }
  std::vector<VertexId> unpeeled(base_count);
  for (int t = 0; t < base_count; ++t) unpeeled[t] = t;
  out.gamma_observed = mean_level(engine.state(), unpeeled);

  if (out.gamma_observed < params.capital_gamma) {
    out.stage_stopped = 1;
    out.optimum = base_count / 2;
    const PrimalDualReport score = primal_dual_report(engine.state(), 0.0);
    out.primal = score.primal;
    out.dual = score.dual;
    out.observed_ratio = out.primal / out.optimum;
    return out;
  }

  // Second stage: blocks of k arrivals against the unpeeled base, then peel
  // the k least matched base vertices (stable selection: ties keep the
  // smaller id first because the sort key includes the id).
  std::vector<std::vector<VertexId>> peeled_blocks;
  std::vector<std::vector<VertexId>> arrival_blocks;
  peeled_blocks.reserve(params.n);
  arrival_blocks.reserve(params.n);
  for (int i = 1; i <= params.n; ++i) {
    std::vector<VertexId> block(params.k);
    for (int j = 0; j < params.k; ++j) block[j] = engine.add_arrival(unpeeled);

    std::vector<VertexId> order = unpeeled;
    std::sort(order.begin(), order.end(), [&](VertexId a, VertexId b) {
      const double xa = engine.state().x_level[a];
      const double xb = engine.state().x_level[b];
      return xa < xb || (xa == xb && a < b);
    });
    std::vector<VertexId> peeled(order.begin(), order.begin() + params.k);
    std::sort(peeled.begin(), peeled.end());

    out.alphas.push_back(mean_level(engine.state(), peeled));
    out.betas.push_back(mean_level(engine.state(), block));

    std::vector<VertexId> rest;
    rest.reserve(unpeeled.size() - peeled.size());
    std::set_difference(unpeeled.begin(), unpeeled.end(), peeled.begin(), peeled.end(),
                        std::back_inserter(rest));
    unpeeled = std::move(rest);
    peeled_blocks.push_back(std::move(peeled));
    arrival_blocks.push_back(std::move(block));
  }

  // Third stage: attack every step whose blocks stayed matchable enough that
  // the follow-up extraction would fall short of the target.
  for (int i = 1; i <= params.n; ++i) {
    if (triangle_bound(out.alphas[i - 1]) + triangle_bound(out.betas[i - 1]) <
        params.capital_gamma) {
      out.penalized_steps.push_back(i);
    }
  }
  for (int i : out.penalized_steps) {
    attack_block(engine, peeled_blocks[i - 1]);
    attack_block(engine, arrival_blocks[i - 1]);
  }

  out.stage_stopped = 3;
  out.optimum = static_cast<double>(params.n + out.penalized_steps.size()) * params.k;
  const PrimalDualReport score = primal_dual_report(engine.state(), 0.0);
  out.primal = score.primal;
  out.dual = score.dual;
  out.observed_ratio = out.primal / out.optimum;
  return out;
}

std::string adversary_result_to_json(const AdversaryResult& result) {
  nlohmann::ordered_json doc;
  doc["params"] = {{"n", result.params.n},
                   {"k", result.params.k},
                   {"gamma", result.params.gamma},
                   {"capital_gamma", result.params.capital_gamma}};
  doc["stage_stopped"] = result.stage_stopped;
  doc["gamma_observed"] = result.gamma_observed;
  doc["alphas"] = result.alphas;
  doc["betas"] = result.betas;
  doc["penalized_steps"] = result.penalized_steps;
  doc["optimum"] = result.optimum;
  doc["primal"] = result.primal;
  doc["dual"] = result.dual;
  doc["observed_ratio"] = result.observed_ratio;
  doc["error_budget"] = result.error_budget;
  return doc.dump(2) + "\n";
}

}  // namespace lm::hardness
