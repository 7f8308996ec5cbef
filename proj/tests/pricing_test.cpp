#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "lm/pricing/h_grid.hpp"
#include "lm/pricing/phi_bounds.hpp"
#include "lm/pricing/price_system.hpp"

namespace {

// h(tau, theta) = theta: the price ignores history entirely.
lm::HGrid identity_grid(int n) {
  std::vector<double> values;
  values.reserve(static_cast<size_t>(n + 1) * (n + 1));
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) values.push_back(static_cast<double>(j) / n);
  }
  return lm::make_h_grid(n, std::move(values));
}

// h(tau, theta) = theta + 0.5 * theta * (1 - theta) * (tau - 0.5): a smooth
// history-dependent tilt that keeps every grid invariant comfortably.
double tilted_h(double tau, double theta) {
  return theta + 0.5 * theta * (1.0 - theta) * (tau - 0.5);
}

lm::HGrid tilted_grid(int n) {
  std::vector<double> values;
  values.reserve(static_cast<size_t>(n + 1) * (n + 1));
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      values.push_back(tilted_h(static_cast<double>(i) / n, static_cast<double>(j) / n));
    }
  }
  return lm::make_h_grid(n, std::move(values));
}

// Discrete form of H at grid points: (j/n) h[i][j] minus the trapezoid sum
// over whole cells. Written independently of H_value as a cross-check.
double grid_sum_H(const lm::HGrid& grid, int i, int j) {
  double sum = 0.0;
  for (int y = i; y < j; ++y) {
    sum += (grid.at(i, y) + grid.at(i, y + 1)) / (2.0 * grid.n);
  }
  return (static_cast<double>(j) / grid.n) * grid.at(i, j) - sum;
}

}  // namespace

TEST_CASE("grid validation accepts the identity grid") {
  const lm::HGrid grid = identity_grid(8);
  CHECK_NOTHROW(lm::validate_h_grid(grid));
}

TEST_CASE("grid validation rejects bad shapes and values") {
  const int n = 4;
  auto values = identity_grid(n).values;

  SUBCASE("wrong length") {
    values.pop_back();
    CHECK_THROWS_AS(lm::make_h_grid(n, values), std::invalid_argument);
  }
  SUBCASE("boundary column not zero") {
    values[0 * (n + 1) + 0] = 0.05;
    CHECK_THROWS_AS(lm::make_h_grid(n, values), std::invalid_argument);
  }
  SUBCASE("boundary column not one") {
    values[2 * (n + 1) + n] = 0.97;
    CHECK_THROWS_AS(lm::make_h_grid(n, values), std::invalid_argument);
  }
  SUBCASE("row not strictly increasing") {
    values[1 * (n + 1) + 2] = values[1 * (n + 1) + 1];
    CHECK_THROWS_AS(lm::make_h_grid(n, values), std::invalid_argument);
  }
  SUBCASE("value outside the unit interval") {
    values[3 * (n + 1) + 1] = -0.2;
    CHECK_THROWS_AS(lm::make_h_grid(n, values), std::invalid_argument);
  }
  SUBCASE("non-finite value") {
    values[3 * (n + 1) + 1] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(lm::make_h_grid(n, values), std::invalid_argument);
  }
}

TEST_CASE("grid validation enforces the 12/n step bound") {
  // n = 16: steps above 0.75 are illegal. Build a monotone row that jumps by
  // 0.83 in one cell so the step cap is the only violated condition.
  const int n = 16;
  auto values = identity_grid(n).values;
  for (int j = 0; j <= n; ++j) {
    double v;
    if (j <= 7) {
      v = 0.01 * j;  // 0 .. 0.07
    } else if (j == 8) {
      v = 0.9;  // step of 0.83 > 12/n
    } else {
      v = 0.9 + 0.0125 * (j - 8);
    }
    values[3 * (n + 1) + j] = v;
  }
  values[3 * (n + 1) + n] = 1.0;
  CHECK_THROWS_AS(lm::make_h_grid(n, values), std::invalid_argument);
}

TEST_CASE("grid JSON round trip") {
  const lm::HGrid grid = tilted_grid(6);
  const std::string text = lm::h_grid_to_json(grid);
  const lm::HGrid back = lm::h_grid_from_json(text);
  CHECK(back.n == grid.n);
  REQUIRE(back.values.size() == grid.values.size());
  for (size_t k = 0; k < grid.values.size(); ++k) {
    CHECK(back.values[k] == doctest::Approx(grid.values[k]).epsilon(1e-15));
  }
  CHECK(lm::h_grid_to_json(back) == text);
}

TEST_CASE("grid JSON loader rejects malformed input") {
  CHECK_THROWS_AS(lm::h_grid_from_json("not json"), std::invalid_argument);
  CHECK_THROWS_AS(lm::h_grid_from_json("{\"n\": 2}"), std::invalid_argument);
  CHECK_THROWS_AS(lm::h_grid_from_json("{\"n\": 2, \"values\": [0, 1]}"), std::invalid_argument);
  // Right shape, broken invariant: a row that decreases.
  CHECK_THROWS_AS(lm::h_grid_from_json("{\"n\": 1, \"values\": [0, 1, 0.5, 1]}"),
                  std::invalid_argument);
}

TEST_CASE("interpolation reproduces stored values at grid points") {
  const lm::HGrid grid = tilted_grid(5);
  for (int i = 0; i <= 5; ++i) {
    for (int j = 0; j <= 5; ++j) {
      const double tau = static_cast<double>(i) / 5;
      const double theta = static_cast<double>(j) / 5;
      CHECK(lm::interpolate_h(grid, tau, theta) == grid.at(i, j));
    }
  }
}

TEST_CASE("interpolation at a cell midpoint averages the four corners") {
  const lm::HGrid grid = tilted_grid(4);
  const double mid = lm::interpolate_h(grid, 0.375, 0.625);  // center of cell (1, 2)
  const double mean =
      0.25 * (grid.at(1, 2) + grid.at(1, 3) + grid.at(2, 2) + grid.at(2, 3));
  CHECK(mid == doctest::Approx(mean).epsilon(1e-14));
}

TEST_CASE("interpolation on the identity grid returns theta") {
  const lm::HGrid grid = identity_grid(10);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double tau = unit(rng);
    const double theta = unit(rng);
    CHECK(lm::interpolate_h(grid, tau, theta) == doctest::Approx(theta).epsilon(1e-12));
  }
}

TEST_CASE("interpolation is monotone in theta") {
  const lm::HGrid grid = tilted_grid(9);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double tau = unit(rng);
    double a = unit(rng), b = unit(rng);
    if (a > b) std::swap(a, b);
    CHECK(lm::interpolate_h(grid, tau, a) <= lm::interpolate_h(grid, tau, b) + 1e-15);
  }
}

TEST_CASE("price curve boundary values and identity behavior") {
  const lm::PriceSystem ps(identity_grid(12));
  CHECK(ps.f_inverse(0.0) == 0.0);
  CHECK(ps.f_inverse(1.0) == 1.0);
  for (double x : {0.0, 0.125, 0.3, 0.5, 0.77, 1.0}) {
    CHECK(ps.f_of(x) == doctest::Approx(x).epsilon(1e-9));
    CHECK(ps.f_inverse(x) == doctest::Approx(x).epsilon(1e-12));
  }
}

TEST_CASE("f_of and f_inverse are mutual inverses") {
  const lm::PriceSystem ps(tilted_grid(16));
  for (int k = 0; k <= 40; ++k) {
    const double t = static_cast<double>(k) / 40;
    CHECK(ps.f_of(ps.f_inverse(t)) == doctest::Approx(t).epsilon(1e-9));
    CHECK(ps.f_inverse(ps.f_of(t)) == doctest::Approx(t).epsilon(1e-9));
  }
}

TEST_CASE("price system rejects a non-increasing diagonal") {
  // Rows stay strictly increasing, but the diagonal dips at index 2.
  const int n = 4;
  auto values = identity_grid(n).values;
  values[2 * (n + 1) + 1] = 0.10;
  values[2 * (n + 1) + 2] = 0.20;  // below h(1/4, 1/4) = 0.25
  const lm::HGrid grid = lm::make_h_grid(n, values);
  CHECK_NOTHROW(lm::validate_h_grid(grid));
  CHECK_THROWS_AS(lm::PriceSystem{grid}, std::invalid_argument);
}

TEST_CASE("two-argument price on the identity grid returns the level") {
  const lm::PriceSystem ps(identity_grid(10));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    double a = unit(rng), x = unit(rng);
    if (a > x) std::swap(a, x);
    CHECK(ps.g_of(a, x) == doctest::Approx(x).epsilon(1e-9));
  }
}

TEST_CASE("two-argument price properties") {
  const lm::PriceSystem ps(tilted_grid(16));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    double a = unit(rng);
    double x1 = a + unit(rng) * (1.0 - a);
    double x2 = a + unit(rng) * (1.0 - a);
    if (x1 > x2) std::swap(x1, x2);
    const double g1 = ps.g_of(a, x1);
    const double g2 = ps.g_of(a, x2);
    CHECK(g1 >= 0.0);
    CHECK(g2 <= 1.0);
    CHECK(g1 <= g2 + 1e-9);
  }
  // Saturated vertices always price at 1.
  for (double a : {0.0, 0.4, 1.0}) CHECK(ps.g_of(a, 1.0) == 1.0);
  // Fresh history reduces to the single-argument curve.
  for (double x : {0.1, 0.33, 0.5, 0.9}) {
    CHECK(ps.g_of(x, x) == doctest::Approx(ps.f_of(x)).epsilon(1e-8));
  }
  CHECK_THROWS_AS(ps.g_of(0.6, 0.2), std::invalid_argument);
}

TEST_CASE("exact evaluators agree with the bisection-based operations") {
  const lm::PriceSystem ps(tilted_grid(16));
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const double x = unit(rng);
    CHECK(ps.diagonal_inverse(x) == doctest::Approx(ps.f_of(x)).epsilon(1e-9));
  }
  for (int trial = 0; trial < 100; ++trial) {
    double a = unit(rng);
    const lm::PriceRow row = ps.price_row(a);
    for (int k = 0; k < 5; ++k) {
      const double x = a + unit(rng) * (1.0 - a);
      CHECK(row.price_at(x) == doctest::Approx(ps.g_of(a, x)).epsilon(1e-9));
    }
  }
}

TEST_CASE("H matches its closed form on the identity grid") {
  const lm::HGrid grid = identity_grid(10);
  CHECK(lm::H_value(grid, 0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    double tau = unit(rng), theta = unit(rng);
    if (tau > theta) std::swap(tau, theta);
    const double expect = 0.5 * (theta * theta + tau * tau);
    CHECK(lm::H_value(grid, tau, theta) == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("H at an empty interval reduces to tau times the diagonal") {
  const lm::HGrid grid = tilted_grid(8);
  for (int k = 0; k <= 16; ++k) {
    const double tau = static_cast<double>(k) / 16;
    const double expect = tau * lm::interpolate_h(grid, tau, tau);
    CHECK(lm::H_value(grid, tau, tau) == doctest::Approx(expect).epsilon(1e-13));
  }
}

TEST_CASE("H at grid points matches the discrete trapezoid sum") {
  const lm::HGrid grid = tilted_grid(12);
  for (int i = 0; i <= 12; ++i) {
    for (int j = i; j <= 12; ++j) {
      const double tau = static_cast<double>(i) / 12;
      const double theta = static_cast<double>(j) / 12;
      const double direct = lm::H_value(grid, tau, theta);
      const double by_sum = grid_sum_H(grid, i, j);
      CHECK(std::abs(direct - by_sum) <= 1e-12);
    }
  }
}

TEST_CASE("H rejects a reversed interval") {
  const lm::HGrid grid = identity_grid(4);
  CHECK_THROWS_AS(lm::H_value(grid, 0.8, 0.2), std::invalid_argument);
}

TEST_CASE("phi1 boundary identities") {
  const lm::HGrid grid = tilted_grid(10);
  CHECK(lm::phi1(grid, 0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-13));
  // On the identity grid the minimum sits at (0, 1) with value 1/2.
  const lm::HGrid id = identity_grid(10);
  double best = 2.0;
  double best_tau = -1.0, best_theta = -1.0;
  for (int i = 0; i <= 40; ++i) {
    for (int j = i; j <= 40; ++j) {
      const double tau = static_cast<double>(i) / 40;
      const double theta = static_cast<double>(j) / 40;
      const double value = lm::phi1(id, tau, theta);
      if (value < best) {
        best = value;
        best_tau = tau;
        best_theta = theta;
      }
    }
  }
  CHECK(best == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(best_tau == 0.0);
  CHECK(best_theta == 1.0);
}

TEST_CASE("phi2 evaluates and guards its domain") {
  const lm::HGrid grid = identity_grid(10);
  // On the identity grid: phi2 = (t_u^2 + h_u^2)/2 + (t_v^2 + h_v^2)/2
  // + (1 - h_u)(1 - h_v) with h = theta.
  const double tau_u = 0.2, theta_u = 0.7, tau_v = 0.4, theta_v = 0.9;
  const double expect = 0.5 * (tau_u * tau_u + theta_u * theta_u) +
                        0.5 * (tau_v * tau_v + theta_v * theta_v) +
                        (1.0 - theta_u) * (1.0 - theta_v);
  CHECK(lm::phi2(grid, tau_u, theta_u, tau_v, theta_v) ==
        doctest::Approx(expect).epsilon(1e-10));
  // tau_v below 1 - theta_u is outside the guarantee's domain.
  CHECK_THROWS_AS(lm::phi2(grid, 0.2, 0.7, 0.1, 0.9), std::invalid_argument);
  CHECK_THROWS_AS(lm::phi2(grid, 0.8, 0.2, 0.9, 0.95), std::invalid_argument);
}

TEST_CASE("phi_general identities") {
  const lm::HGrid grid = tilted_grid(10);
  CHECK(lm::phi_general(grid, 0.0, 1.0) ==
        doctest::Approx(lm::H_value(grid, 0.0, 1.0)).epsilon(1e-13));
  const lm::HGrid id = identity_grid(10);
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    double tau = unit(rng), theta = unit(rng);
    if (tau > theta) std::swap(tau, theta);
    const double expect =
        0.5 * (theta * theta + tau * tau) + (1.0 - theta) * (1.0 - theta);
    CHECK(lm::phi_general(id, tau, theta) == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("certification fails the identity grid at 0.6 and passes at 0") {
  const lm::HGrid grid = identity_grid(10);
  const lm::CertifyReport fully =
      lm::certify_continuous_feasibility(grid, lm::Model::FullyOnline, 0.6, 20000, 42);
  CHECK_FALSE(fully.pass);
  // min phi1 approaches 1/2 near (0, 1); sampling gets close.
  CHECK(fully.min_phi1 < 0.53);
  CHECK(fully.min_phi1 >= 0.5 - 1e-9);

  const lm::CertifyReport trivially =
      lm::certify_continuous_feasibility(grid, lm::Model::FullyOnline, 0.0, 2000, 42);
  CHECK(trivially.pass);
  const lm::CertifyReport general =
      lm::certify_continuous_feasibility(grid, lm::Model::GeneralArrival, 0.0, 2000, 42);
  CHECK(general.pass);
  CHECK(std::isinf(general.min_phi1));
  CHECK(general.min_phi_general < 1.0);
}

TEST_CASE("certification is deterministic for a fixed seed") {
  const lm::HGrid grid = tilted_grid(8);
  const lm::CertifyReport a =
      lm::certify_continuous_feasibility(grid, lm::Model::FullyOnline, 0.4, 5000, 99);
  const lm::CertifyReport b =
      lm::certify_continuous_feasibility(grid, lm::Model::FullyOnline, 0.4, 5000, 99);
  CHECK(a.min_phi1 == b.min_phi1);
  CHECK(a.min_phi2 == b.min_phi2);
  CHECK(a.pass == b.pass);
}
