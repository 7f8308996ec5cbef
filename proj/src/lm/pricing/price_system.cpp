#include "lm/pricing/price_system.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lm/core/tolerances.hpp"

namespace lm {
namespace {

constexpr double kDomainTol = 1e-9;

// Bilinear corners of the diagonal cell [i/n,(i+1)/n]^2, packed as the
// quadratic q(t) = d00 + B t + A t^2 that the diagonal traces across it.
struct DiagCell {
  double d00, a, b;  // q(t) = d00 + b*t + a*t^2
};

DiagCell diag_cell(const HGrid& grid, int i) {
  const double d00 = grid.at(i, i);
  const double d01 = grid.at(i, i + 1);
  const double d10 = grid.at(i + 1, i);
  const double d11 = grid.at(i + 1, i + 1);
  return {d00, d00 + d11 - d01 - d10, d01 + d10 - 2.0 * d00};
}

}  // namespace

double PriceRow::price_at(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  // level is strictly increasing from 0 to 1; find the cell holding x.
  const auto it = std::upper_bound(level.begin(), level.end(), x);
  int j = static_cast<int>(it - level.begin()) - 1;
  j = std::clamp(j, 0, n - 1);
  const double lo = level[j];
  const double hi = level[j + 1];
  const double t = (x - lo) / (hi - lo);
  return (j + t) / n;
}

PriceSystem::PriceSystem(HGrid grid) : PriceSystem(std::move(grid), true) {}

PriceSystem PriceSystem::from_level_curve(std::vector<double> curve) {
  const int n = static_cast<int>(curve.size()) - 1;
  if (n < 1) {
    throw std::invalid_argument("from_level_curve: need at least two curve points");
  }
  if (std::abs(curve.front()) > 1e-12 || std::abs(curve.back() - 1.0) > 1e-12) {
    throw std::invalid_argument("from_level_curve: curve must run from 0 to 1");
  }
  curve.front() = 0.0;
  curve.back() = 1.0;
  for (int j = 0; j < n; ++j) {
    if (curve[j + 1] - curve[j] < 1e-12) {
      throw std::invalid_argument("from_level_curve: curve must be strictly increasing at index " +
                                  std::to_string(j));
    }
  }
  HGrid grid;
  grid.n = n;
  grid.values.reserve(static_cast<size_t>(n + 1) * (n + 1));
  for (int i = 0; i <= n; ++i) {
    grid.values.insert(grid.values.end(), curve.begin(), curve.end());
  }
  return PriceSystem(std::move(grid), false);
}

PriceSystem PriceSystem::identity_prices(int n) {
  if (n < 1) throw std::invalid_argument("identity_prices: n must be positive");
  std::vector<double> curve(n + 1);
  for (int j = 0; j <= n; ++j) curve[j] = static_cast<double>(j) / n;
  curve[n] = 1.0;
  return from_level_curve(std::move(curve));
}

PriceSystem::PriceSystem(HGrid grid, bool run_grid_validation)
    : grid_(std::move(grid)), certified_(run_grid_validation) {
  if (run_grid_validation) validate_h_grid(grid_);
  const int n = grid_.n;
  diag_.resize(n + 1);
  for (int i = 0; i <= n; ++i) diag_[i] = grid_.at(i, i);
  constexpr double kSlopeFloor = 1e-12;
  for (int i = 0; i < n; ++i) {
    if (diag_[i + 1] - diag_[i] < kSlopeFloor) {
      throw std::invalid_argument("price system: grid diagonal not strictly increasing at index " +
                                  std::to_string(i));
    }
    // The interpolated diagonal is quadratic inside each cell; its slope is
    // linear in t, so positivity at both ends makes the whole cell increase.
    const DiagCell c = diag_cell(grid_, i);
    if (c.b < kSlopeFloor || c.b + 2.0 * c.a < kSlopeFloor) {
      throw std::invalid_argument(
          "price system: interpolated diagonal not strictly increasing inside cell " +
          std::to_string(i));
    }
  }
}

double PriceSystem::f_inverse(double tau) const { return interpolate_h(grid_, tau, tau); }

double PriceSystem::f_of(double x) const {
  if (x < -kDomainTol || x > 1.0 + kDomainTol) {
    throw std::invalid_argument("f_of: argument " + std::to_string(x) + " outside [0,1]");
  }
  x = std::clamp(x, 0.0, 1.0);
  double lo = 0.0, hi = 1.0;
  while (hi - lo > tol::kRootFind) {
    const double mid = 0.5 * (lo + hi);
    if (f_inverse(mid) <= x) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double PriceSystem::g_of(double a, double x) const {
  if (a < -kDomainTol || x > 1.0 + kDomainTol) {
    throw std::invalid_argument("g_of: arguments outside [0,1]");
  }
  if (x < a - kDomainTol) {
    throw std::invalid_argument("g_of: level x=" + std::to_string(x) +
                                " below frozen level a=" + std::to_string(a));
  }
  a = std::clamp(a, 0.0, 1.0);
  x = std::clamp(x, a, 1.0);
  const double tau = f_of(a);
  if (x >= 1.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  while (hi - lo > tol::kRootFind) {
    const double mid = 0.5 * (lo + hi);
    if (interpolate_h(grid_, tau, mid) <= x) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double PriceSystem::diagonal_inverse(double x) const {
  const int n = grid_.n;
  x = std::clamp(x, 0.0, 1.0);
  const auto it = std::upper_bound(diag_.begin(), diag_.end(), x);
  int i = static_cast<int>(it - diag_.begin()) - 1;
  i = std::clamp(i, 0, n - 1);
  const DiagCell c = diag_cell(grid_, i);
  const double rhs = std::clamp(x - c.d00, 0.0, diag_[i + 1] - c.d00);
  double t;
  if (std::abs(c.a) < 1e-14) {
    t = rhs / c.b;
  } else {
    // Increasing branch of a*t^2 + b*t - rhs = 0, in the form that stays
    // stable as a -> 0 (b > 0 is guaranteed by the constructor check).
    const double disc = std::max(0.0, c.b * c.b + 4.0 * c.a * rhs);
    t = 2.0 * rhs / (c.b + std::sqrt(disc));
  }
  return (i + std::clamp(t, 0.0, 1.0)) / n;
}

PriceRow PriceSystem::price_row(double a) const {
  const int n = grid_.n;
  const double tau = diagonal_inverse(a);
  const double s = tau * n;
  int i = std::clamp(static_cast<int>(std::floor(s)), 0, n - 1);
  double w = std::clamp(s - i, 0.0, 1.0);
  if (i == n - 1 && w > 1.0 - 1e-15) w = 1.0;
  PriceRow row;
  row.n = n;
  row.level.resize(n + 1);
  for (int j = 0; j <= n; ++j) {
    const double lo = grid_.at(i, j);
    const double hi = grid_.at(i + 1, j);
    // Keep equal corners exact: degenerate systems have identical rows and
    // their cached levels must reproduce the curve bit for bit.
    row.level[j] = lo == hi ? lo : (1.0 - w) * lo + w * hi;
  }
  row.level[0] = 0.0;
  row.level[n] = 1.0;
  return row;
}

}  // namespace lm
