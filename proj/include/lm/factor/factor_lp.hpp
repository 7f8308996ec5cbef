#pragma once

#include <map>
#include <string>
#include <vector>

#include "lm/lp/model.hpp"
#include "lm/lp/solve.hpp"
#include "lm/pricing/h_grid.hpp"

namespace lm {

// Which guarantee family the factor-revealing LP maximizes over.
enum class FactorFamily { FullyOnline, GeneralArrival, NaiveOneDim };

std::string to_string(FactorFamily family);

struct FactorLPSpec {
  FactorFamily family = FactorFamily::FullyOnline;
  int n = 100;
  // Cutting-plane solve for the large constraint families (the four-index
  // phi2 family grows like n^4/8). Ignored where enumeration is small.
  bool use_row_generation = true;
  // Model the per-pair H values as equality-defined variables so phi2 rows
  // carry at most 4 nonzeros instead of O(n).
  bool use_auxiliary_H = true;
};

void validate_factor_spec(const FactorLPSpec& spec);

// Variable layout shared by the builders, the separators, and the tests.
// Two-dimensional families: h(i,j) row-major, then Gamma, then (auxiliary
// mode only) H(i,j) row-major with the i > j entries pinned to zero.
// One-dimensional family: h(0..n), then Gamma.
inline int h_var(int n, int i, int j) { return i * (n + 1) + j; }
inline int gamma_var(int n) { return (n + 1) * (n + 1); }
inline int H_var(int n, int i, int j) { return (n + 1) * (n + 1) + 1 + i * (n + 1) + j; }
inline int naive_h_var(int i) { return i; }
inline int naive_gamma_var(int n) { return n + 1; }

// maximize Gamma subject to, over the uniform grid {0, 1/n, ..., 1}:
//   Gamma <= phi1(tau_v, theta_v) - 5/(2n^2)        for tau_v <= theta_v,
//   Gamma <= phi2(tau_u, theta_u, tau_v, theta_v) - 5/n^2
//            for tau_u <= theta_u and 1 - theta_u <= tau_v <= theta_v,
// with h(.,0) = 0 and h(.,1) = 1 fixed, rows strictly increasing in theta
// (gap 1e-9/n), steps at most 4/n in each coordinate, and the interpolated
// diagonal increasing inside every cell (so the solved grid always yields a
// usable price curve). Discrete integrals are trapezoid sums over cells.
lm::lp::LinearProgram build_fully_online_lp(int n, bool use_auxiliary_H = true);

// maximize Gamma subject to, for every tau_v <= theta_v:
//   Gamma <= H(tau_v, theta_v)
//          + (1 - theta_v) * h(1 - theta_v, 1 - theta_v) - 5/(2n^2),
// the same boundary / monotonicity / Lipschitz / diagonal-cell rows, plus
// (i/n) * h(i,i) nondecreasing in i. H is always expanded in place here
// (about n^2/2 phi rows, so auxiliary variables buy nothing).
lm::lp::LinearProgram build_general_arrival_lp(int n);

// One-dimensional restriction where the price ignores history:
// variables h(0..n) and Gamma; for every tau_v <= theta_v and every
// tau_u >= 1 - theta_v:
//   Gamma <= theta_v h(theta_v) - trapezoid(tau_v, theta_v)
//          + tau_u h(tau_u) - 5/(2n^2),
// with h(0) = 0, h(1) = 1, h strictly increasing, and tau h(tau)
// nondecreasing.
lm::lp::LinearProgram build_naive_lp(int n);

struct FactorSolution {
  FactorLPSpec spec;
  double gamma = 0.0;
  // Two-dimensional families only; validated and price-system compatible.
  HGrid grid;
  // NaiveOneDim only: h(0..n).
  std::vector<double> curve;
  std::map<std::string, int> constraint_counts;
  int rounds = 1;
  double solve_seconds = 0.0;
  std::string backend;
};

// Builds and solves the requested LP, cleans the solution (snaps the fixed
// boundary columns, clamps into [0,1], restores strict monotonicity eaten by
// solver roundoff), and recomputes gamma as the exact minimum of the
// constraint family on the cleaned values. Throws std::runtime_error if that
// minimum drifts more than 1e-6 from the LP objective or the cleaned grid
// fails re-validation.
FactorSolution solve_factor_lp(const FactorLPSpec& spec,
                               const lm::lp::SolveOptions& options = {});

}  // namespace lm
