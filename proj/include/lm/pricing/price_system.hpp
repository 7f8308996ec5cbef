#pragma once

#include <vector>

#include "lm/pricing/h_grid.hpp"

namespace lm {

// Piecewise-linear inverse of one interpolated row theta -> h(tau*, theta),
// cached per vertex by the matching engine so that repeated price lookups
// avoid bisection. level[j] = h(tau*, j/n), strictly increasing from 0 to 1.
struct PriceRow {
  int n = 0;
  std::vector<double> level;

  // Largest theta with h(tau*, theta) <= x, computed exactly per cell.
  double price_at(double x) const;
};

// Price bookkeeping on top of an HGrid.
//
// The diagonal d(tau) = h(tau, tau) is the single-argument price curve f in
// inverse form: f_inverse(tau) = d(tau) and f_of(x) solves d(tau) = x. The
// two-argument price g_of(a, x) is the largest theta with
// h(f_of(a), theta) <= x. The constructor rejects grids whose interpolated
// diagonal is not strictly increasing (f would not exist), checking both the
// grid diagonal and the in-cell quadratic slope at both cell ends.
class PriceSystem {
 public:
  explicit PriceSystem(HGrid grid);

  // Degenerate system whose every row equals the given strictly increasing
  // level curve (curve[0] = 0, curve[n] = 1). The two-argument price then
  // ignores the frozen level entirely: g_of(a, x) = f_of(x) = the curve's
  // inverse at x. Used by the eager water-filling variant and by closed-form
  // tests. Skips the solved-grid validation (step caps, cell twist), so
  // certified() reports false.
  static PriceSystem from_level_curve(std::vector<double> curve);

  // from_level_curve on curve[j] = j/n: f(x) = x and g(a, x) = x, exactly.
  static PriceSystem identity_prices(int n);

  // False for systems built by the degenerate factories above, true for
  // grids that passed the full structural validation.
  bool certified() const { return certified_; }

  const HGrid& grid() const { return grid_; }
  int n() const { return grid_.n; }

  // f_inverse(tau) = interpolated diagonal value h(tau, tau).
  double f_inverse(double tau) const;

  // Unique tau in [0,1] with f_inverse(tau) = x, by bisection to 1e-10.
  double f_of(double x) const;

  // sup{theta : h(f_of(a), theta) <= x}, by bisection to 1e-10.
  // Requires 0 <= a <= x <= 1 (a small tolerance is allowed at the a = x
  // boundary); throws std::invalid_argument when x < a beyond tolerance.
  double g_of(double a, double x) const;

  // Exact closed-form inverse of the piecewise-quadratic diagonal. Agrees
  // with f_of within 1e-9; used on hot paths.
  double diagonal_inverse(double x) const;

  // Row cache at tau* = diagonal_inverse(a); price_row(a).price_at(x)
  // agrees with g_of(a, x) within 1e-9.
  PriceRow price_row(double a) const;

 private:
  PriceSystem(HGrid grid, bool run_grid_validation);

  HGrid grid_;
  std::vector<double> diag_;  // diag_[i] = h(i/n, i/n)
  bool certified_ = true;
};

}  // namespace lm
