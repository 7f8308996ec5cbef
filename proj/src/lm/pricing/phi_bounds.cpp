#include "lm/pricing/phi_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "lm/core/tolerances.hpp"

namespace lm {
namespace {

constexpr double kDomainTol = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Integral of y -> h(tau, y) over [a, b]. For fixed tau the interpolant is
// linear inside each theta cell, so trapezoids over the cell segments are
// exact.
double integrate_row(const HGrid& grid, double tau, double a, double b) {
  if (b <= a) return 0.0;
  const int n = grid.n;
  // Grid lines strictly inside (a, b].
  int first = static_cast<int>(std::ceil(a * n - 1e-12));
  int last = static_cast<int>(std::floor(b * n + 1e-12));
  first = std::max(first, 0);
  last = std::min(last, n);
  double sum = 0.0;
  double prev_y = a;
  double prev_v = interpolate_h(grid, tau, a);
  for (int j = first; j <= last; ++j) {
    const double y = static_cast<double>(j) / n;
    if (y <= prev_y + 1e-15) continue;
    if (y > b) break;
    const double v = interpolate_h(grid, tau, y);
    sum += 0.5 * (prev_v + v) * (y - prev_y);
    prev_y = y;
    prev_v = v;
  }
  if (b > prev_y + 1e-15) {
    const double v = interpolate_h(grid, tau, b);
    sum += 0.5 * (prev_v + v) * (b - prev_y);
  }
  return sum;
}

void require_ordered(const char* what, double tau, double theta) {
  if (tau < -kDomainTol || theta > 1.0 + kDomainTol || theta < tau - kDomainTol) {
    throw std::invalid_argument(std::string(what) + ": need 0 <= tau <= theta <= 1, got tau=" +
                                std::to_string(tau) + " theta=" + std::to_string(theta));
  }
}

}  // namespace

double H_value(const HGrid& grid, double tau, double theta) {
  require_ordered("H_value", tau, theta);
  tau = std::clamp(tau, 0.0, 1.0);
  theta = std::clamp(theta, tau, 1.0);
  return theta * interpolate_h(grid, tau, theta) - integrate_row(grid, tau, tau, theta);
}

double phi1(const HGrid& grid, double tau_v, double theta_v) {
  return H_value(grid, tau_v, theta_v) + 1.0 - theta_v;
}

double phi2(const HGrid& grid, double tau_u, double theta_u, double tau_v, double theta_v) {
  require_ordered("phi2 (u side)", tau_u, theta_u);
  require_ordered("phi2 (v side)", tau_v, theta_v);
  if (tau_v < 1.0 - theta_u - kDomainTol) {
    throw std::invalid_argument("phi2: need tau_v >= 1 - theta_u, got tau_v=" +
                                std::to_string(tau_v) + " theta_u=" + std::to_string(theta_u));
  }
  const double hu = interpolate_h(grid, tau_u, theta_u);
  return H_value(grid, tau_u, theta_u) + H_value(grid, tau_v, theta_v) +
         (1.0 - hu) * (1.0 - theta_v);
}

double phi_general(const HGrid& grid, double tau_v, double theta_v) {
  const double r = 1.0 - theta_v;
  return H_value(grid, tau_v, theta_v) + r * interpolate_h(grid, r, r);
}

CertifyReport certify_continuous_feasibility(const HGrid& grid, Model family, double gamma,
                                             int num_samples, std::uint64_t seed) {
  if (num_samples < 1) throw std::invalid_argument("certify: num_samples must be positive");
  CertifyReport report;
  report.gamma = gamma;
  report.num_samples = num_samples;
  report.min_phi1 = kInf;
  report.min_phi2 = kInf;
  report.min_phi_general = kInf;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto ordered_pair = [&]() {
    double a = unit(rng), b = unit(rng);
    if (a > b) std::swap(a, b);
    return std::make_pair(a, b);
  };

  if (family == Model::FullyOnline) {
    for (int s = 0; s < num_samples; ++s) {
      const auto [tau, theta] = ordered_pair();
      report.min_phi1 = std::min(report.min_phi1, phi1(grid, tau, theta));
    }
    for (int s = 0; s < num_samples; ++s) {
      const auto [tau_u, theta_u] = ordered_pair();
      const double lo = 1.0 - theta_u;
      const double tau_v = lo + unit(rng) * (1.0 - lo);
      const double theta_v = tau_v + unit(rng) * (1.0 - tau_v);
      report.min_phi2 = std::min(report.min_phi2, phi2(grid, tau_u, theta_u, tau_v, theta_v));
    }
    report.pass = report.min_phi1 >= gamma - tol::kUserFacing &&
                  report.min_phi2 >= gamma - tol::kUserFacing;
  } else {
    for (int s = 0; s < num_samples; ++s) {
      const auto [tau, theta] = ordered_pair();
      report.min_phi_general = std::min(report.min_phi_general, phi_general(grid, tau, theta));
    }
    report.pass = report.min_phi_general >= gamma - tol::kUserFacing;
  }
  return report;
}

}  // namespace lm
