#pragma once

#include <string>
#include <vector>

namespace lm {

// Uniform (n+1)x(n+1) discretization of the two-argument price-level
// function h on [0,1]^2; values[i][j] = h(i/n, j/n), row-major.
//
// Invariants (checked by validate_h_grid):
//  - h(tau, 0) = 0 and h(tau, 1) = 1 exactly,
//  - each row is strictly increasing in theta (minimum gap ~1e-9/n, the same
//    floor the factor-revealing LP enforces),
//  - per-step increments are at most 12/n in each coordinate,
//  - all values lie in [0,1].
struct HGrid {
  int n = 0;
  std::vector<double> values;

  double at(int i, int j) const { return values[static_cast<size_t>(i) * (n + 1) + j]; }
  double& at(int i, int j) { return values[static_cast<size_t>(i) * (n + 1) + j]; }
};

// Throws std::invalid_argument naming the first violated invariant.
void validate_h_grid(const HGrid& grid);

// Validates with a 1e-12 entry tolerance, then normalizes: snaps boundary
// columns to exact 0 and 1 and clamps everything into [0,1]. All grid
// producers (the LP pipeline, file loading) go through here.
HGrid make_h_grid(int n, std::vector<double> values);

// Bilinear interpolation between the four surrounding corners. Exact at
// grid points (weights within 1e-12 of a corner snap to it). Arguments are
// clamped to [0,1].
double interpolate_h(const HGrid& grid, double tau, double theta);

// File format: {"n": ..., "values": [ (n+1)^2 numbers, row-major ]}.
std::string h_grid_to_json(const HGrid& grid);
HGrid h_grid_from_json(const std::string& text);
HGrid load_h_grid(const std::string& path);
void save_h_grid(const HGrid& grid, const std::string& path);

}  // namespace lm
