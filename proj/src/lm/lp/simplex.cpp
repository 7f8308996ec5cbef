#include "lm/lp/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace lm::lp {

namespace {

// Column status in the bounded simplex.
enum class ColState : char { Basic, AtLower, AtUpper };

struct Tableau {
  int nrows = 0;
  int ncols = 0;                                   // structurals + slacks (+ artificials)
  std::vector<std::vector<std::pair<int, double>>> cols;  // sparse columns
  std::vector<double> lo, up;
  std::vector<double> cost;                        // current phase, minimize
  std::vector<double> rhs;
  std::vector<ColState> state;
  std::vector<int> basis;                          // column basic in each row
  std::vector<double> xb;                          // basic values
  std::vector<double> binv;                        // row-major nrows*nrows

  double& inv(int i, int j) { return binv[static_cast<size_t>(i) * nrows + j]; }

  double bound_value(int j) const { return state[j] == ColState::AtUpper ? up[j] : lo[j]; }

  // Recomputes basic values from nonbasic bound values: xb = Binv*(b - N x_N).
  void refresh_basics() {
    std::vector<double> r = rhs;
    for (int j = 0; j < ncols; ++j) {
      if (state[j] == ColState::Basic) continue;
      const double v = bound_value(j);
      if (v == 0.0) continue;
      for (const auto& [row, coef] : cols[j]) r[row] -= coef * v;
    }
    for (int i = 0; i < nrows; ++i) {
      double sum = 0.0;
      for (int k = 0; k < nrows; ++k) sum += inv(i, k) * r[k];
      xb[i] = sum;
    }
  }
};

struct LoopResult {
  Status status = Status::Optimal;
  int iterations = 0;
  double objective = 0.0;  // minimize sense over current costs
};

// Runs the simplex loop for the current cost vector until optimality,
// unboundedness, or the iteration cap.
LoopResult run_loop(Tableau& t, const SimplexOptions& opt, int max_iters) {
  LoopResult result;
  std::vector<double> y(t.nrows), w(t.nrows);
  bool bland = false;
  int stalled = 0;

  for (int iter = 0; iter < max_iters; ++iter) {
    // Dual prices y = c_B' Binv.
    for (int k = 0; k < t.nrows; ++k) {
      double sum = 0.0;
      for (int i = 0; i < t.nrows; ++i) {
        const double cb = t.cost[t.basis[i]];
        if (cb != 0.0) sum += cb * t.inv(i, k);
      }
      y[k] = sum;
    }

    // Pricing: most attractive reduced cost (or Bland's rule when stalled).
    int enter = -1;
    double best = opt.dual_tolerance;
    int direction = 0;  // +1 raise from lower, -1 drop from upper
    for (int j = 0; j < t.ncols; ++j) {
      if (t.state[j] == ColState::Basic || t.lo[j] == t.up[j]) continue;
      double d = t.cost[j];
      for (const auto& [row, coef] : t.cols[j]) d -= y[row] * coef;
      if (t.state[j] == ColState::AtLower && d < -best) {
        enter = j;
        direction = +1;
        if (bland) break;
        best = -d;
      } else if (t.state[j] == ColState::AtUpper && d > best) {
        enter = j;
        direction = -1;
        if (bland) break;
        best = d;
      }
    }
    if (enter < 0) {
      result.iterations = iter;
      break;  // optimal for this phase
    }

    // Column through the basis inverse: w = Binv * a_enter.
    std::fill(w.begin(), w.end(), 0.0);
    for (const auto& [row, coef] : t.cols[enter]) {
      for (int i = 0; i < t.nrows; ++i) w[i] += t.inv(i, row) * coef;
    }

    // Bounded ratio test. Movement t of the entering variable changes basic
    // i by -direction * w[i] * t.
    double limit = t.up[enter] - t.lo[enter];  // bound flip distance
    int leave = -1;
    int leave_to_upper = 0;
    for (int i = 0; i < t.nrows; ++i) {
      const double rate = -direction * w[i];
      if (std::abs(rate) <= opt.pivot_tolerance) continue;
      const int k = t.basis[i];
      double room;
      int to_upper;
      if (rate > 0) {
        room = (t.up[k] - t.xb[i]) / rate;
        to_upper = 1;
      } else {
        room = (t.xb[i] - t.lo[k]) / (-rate);
        to_upper = 0;
      }
      room = std::max(room, 0.0);
      if (room < limit - 1e-12) {
        limit = room;
        leave = i;
        leave_to_upper = to_upper;
      } else if (leave >= 0 && room <= limit + 1e-12) {
        // Tie: prefer the larger pivot for stability, or the smallest basis
        // variable under Bland's anti-cycling rule.
        const bool take = bland ? t.basis[i] < t.basis[leave]
                                : std::abs(w[i]) > std::abs(w[leave]);
        if (take) {
          leave = i;
          leave_to_upper = to_upper;
        }
      }
    }

    if (!std::isfinite(limit)) {
      result.status = Status::Unbounded;
      result.iterations = iter;
      return result;
    }

    if (limit <= 1e-12) {
      if (++stalled > 2 * t.nrows + 20) bland = true;
    } else {
      stalled = 0;
    }

    if (leave < 0) {
      // Entering variable flips to its opposite bound.
      for (int i = 0; i < t.nrows; ++i) t.xb[i] -= direction * w[i] * limit;
      t.state[enter] = direction > 0 ? ColState::AtUpper : ColState::AtLower;
      continue;
    }

    // Pivot: entering becomes basic in row `leave`.
    const double enter_value = t.bound_value(enter) + direction * limit;
    const int leaving_col = t.basis[leave];
    for (int i = 0; i < t.nrows; ++i) t.xb[i] -= direction * w[i] * limit;
    t.state[leaving_col] = leave_to_upper ? ColState::AtUpper : ColState::AtLower;
    t.state[enter] = ColState::Basic;
    t.basis[leave] = enter;
    t.xb[leave] = enter_value;

    // Binv update: eliminate the entering column from all other rows.
    const double pivot = w[leave];
    for (int k = 0; k < t.nrows; ++k) t.inv(leave, k) /= pivot;
    for (int i = 0; i < t.nrows; ++i) {
      if (i == leave || std::abs(w[i]) <= 0.0) continue;
      const double factor = w[i];
      for (int k = 0; k < t.nrows; ++k) t.inv(i, k) -= factor * t.inv(leave, k);
    }

    if ((iter + 1) % 128 == 0) t.refresh_basics();
    result.iterations = iter + 1;
  }

  if (result.iterations >= max_iters) result.status = Status::Limit;
  double obj = 0.0;
  for (int j = 0; j < t.ncols; ++j) {
    if (t.cost[j] == 0.0) continue;
    obj += t.cost[j] * (t.state[j] == ColState::Basic ? 0.0 : t.bound_value(j));
  }
  for (int i = 0; i < t.nrows; ++i) obj += t.cost[t.basis[i]] * t.xb[i];
  result.objective = obj;
  return result;
}

}  // namespace

LPSolution solve_dense_simplex(const LinearProgram& lp, const SimplexOptions& options) {
  lp.validate();
  const int nv = lp.num_variables();
  const int m = lp.num_rows();
  for (int j = 0; j < nv; ++j) {
    if (!std::isfinite(lp.lower(j)) && !std::isfinite(lp.upper(j))) {
      throw std::invalid_argument("simplex backend requires every variable to have a finite bound: " +
                                  lp.variable_name(j));
    }
  }

  Tableau t;
  t.nrows = m;
  t.ncols = nv + m;
  t.cols.resize(t.ncols);
  t.lo.assign(t.ncols, 0.0);
  t.up.assign(t.ncols, 0.0);
  t.rhs.resize(m);
  t.state.assign(t.ncols, ColState::AtLower);

  for (int j = 0; j < nv; ++j) {
    t.lo[j] = lp.lower(j);
    t.up[j] = lp.upper(j);
    t.state[j] = std::isfinite(t.lo[j]) ? ColState::AtLower : ColState::AtUpper;
  }
  for (int i = 0; i < m; ++i) {
    const Row& row = lp.row(i);
    t.rhs[i] = row.rhs;
    for (const auto& [var, coef] : row.entries) t.cols[var].emplace_back(i, coef);
    const int s = nv + i;
    t.cols[s] = {{i, 1.0}};
    switch (row.rel) {
      case Relation::LE: t.lo[s] = 0.0; t.up[s] = kInf; break;
      case Relation::GE: t.lo[s] = -kInf; t.up[s] = 0.0; t.state[s] = ColState::AtUpper; break;
      case Relation::EQ: t.lo[s] = 0.0; t.up[s] = 0.0; break;
    }
  }

  // Start from the all-slack basis; rows whose slack value would violate its
  // own bounds get an artificial column carrying the infeasibility instead.
  std::vector<double> residual = t.rhs;
  for (int j = 0; j < nv; ++j) {
    const double v = t.bound_value(j);
    if (v == 0.0) continue;
    for (const auto& [row, coef] : t.cols[j]) residual[row] -= coef * v;
  }
  t.basis.resize(m);
  t.xb.resize(m);
  std::vector<int> artificials;
  for (int i = 0; i < m; ++i) {
    const int s = nv + i;
    if (residual[i] >= t.lo[s] - 1e-12 && residual[i] <= t.up[s] + 1e-12) {
      t.basis[i] = s;
      t.xb[i] = residual[i];
      continue;
    }
    const int a = t.ncols++;
    t.cols.push_back({{i, residual[i] >= 0 ? 1.0 : -1.0}});
    t.lo.push_back(0.0);
    t.up.push_back(kInf);
    t.state.push_back(ColState::Basic);
    t.basis[i] = a;
    t.xb[i] = std::abs(residual[i]);
    artificials.push_back(a);
  }
  t.state.resize(t.ncols, ColState::AtLower);
  for (int i = 0; i < m; ++i) t.state[t.basis[i]] = ColState::Basic;

  t.binv.assign(static_cast<size_t>(m) * m, 0.0);
  for (int i = 0; i < m; ++i) {
    // Initial basis columns are +-1 diagonal, so the inverse is diagonal too.
    t.inv(i, i) = 1.0 / t.cols[t.basis[i]].front().second;
  }
  t.refresh_basics();

  const int max_iters = options.max_iterations > 0 ? options.max_iterations : 20000 + 50 * m;
  LPSolution solution;
  solution.backend = "dense_simplex";

  if (!artificials.empty()) {
    t.cost.assign(t.ncols, 0.0);
    for (int a : artificials) t.cost[a] = 1.0;
    LoopResult phase1 = run_loop(t, options, max_iters);
    solution.iterations += phase1.iterations;
    if (phase1.status == Status::Limit) {
      solution.status = Status::Limit;
      solution.message = "phase 1 hit the iteration cap";
      return solution;
    }
    if (phase1.objective > 1e-7) {
      solution.status = Status::Infeasible;
      solution.message = "phase 1 infeasibility " + std::to_string(phase1.objective);
      return solution;
    }
    for (int a : artificials) t.up[a] = 0.0;  // freeze at zero for phase 2
  }

  t.cost.assign(t.ncols, 0.0);
  const double sign = lp.sense() == Sense::Maximize ? -1.0 : 1.0;
  for (int j = 0; j < nv; ++j) t.cost[j] = sign * lp.objective(j);
  LoopResult phase2 = run_loop(t, options, max_iters);
  solution.iterations += phase2.iterations;
  if (phase2.status != Status::Optimal) {
    solution.status = phase2.status;
    solution.message = phase2.status == Status::Unbounded ? "objective ray detected"
                                                          : "phase 2 hit the iteration cap";
    return solution;
  }

  t.refresh_basics();
  solution.status = Status::Optimal;
  solution.values.assign(nv, 0.0);
  for (int j = 0; j < nv; ++j) {
    if (t.state[j] != ColState::Basic) solution.values[j] = t.bound_value(j);
  }
  for (int i = 0; i < m; ++i) {
    if (t.basis[i] < nv) solution.values[t.basis[i]] = t.xb[i];
  }
  solution.objective_value = lp.objective_value(solution.values);
  return solution;
}

}  // namespace lm::lp
