#pragma once

#include <cstdint>

#include "lm/core/types.hpp"
#include "lm/pricing/h_grid.hpp"

namespace lm {

// H(tau, theta) = theta * h(tau, theta) - integral_tau^theta h(tau, y) dy,
// with the integral taken exactly: for fixed tau the interpolant is
// piecewise linear in y, so each cell segment integrates as a trapezoid.
// Requires tau <= theta (both in [0,1]); throws std::invalid_argument
// otherwise.
double H_value(const HGrid& grid, double tau, double theta);

// Per-edge dual guarantees, evaluated on the interpolated grid.
//
// phi1: edge settled while one endpoint is still matching,
//   phi1 = H(tau_v, theta_v) + 1 - theta_v,              tau_v <= theta_v.
// phi2: edge priced out with both endpoints partially matched,
//   phi2 = H(tau_u, theta_u) + H(tau_v, theta_v)
//        + (1 - h(tau_u, theta_u)) * (1 - theta_v),
//   on the domain tau_u <= theta_u, 1 - theta_u <= tau_v <= theta_v.
// phi_general: single-sided guarantee for the arrival-only model,
//   phi_general = H(tau_v, theta_v)
//               + (1 - theta_v) * h(1 - theta_v, 1 - theta_v).
double phi1(const HGrid& grid, double tau_v, double theta_v);
double phi2(const HGrid& grid, double tau_u, double theta_u, double tau_v,
            double theta_v);
double phi_general(const HGrid& grid, double tau_v, double theta_v);

struct CertifyReport {
  double gamma = 0.0;
  int num_samples = 0;
  // Minima over the sampled tuples; only the fields relevant to the model
  // family are finite (the others stay +infinity).
  double min_phi1 = 0.0;
  double min_phi2 = 0.0;
  double min_phi_general = 0.0;
  bool pass = false;
};

// Monte-Carlo spot check that the interpolated guarantees stay above gamma:
// draws uniformly random parameter tuples in each relevant domain
// (phi1 and phi2 for the fully online family, phi_general for general
// arrivals) and passes iff every sampled value is >= gamma - 1e-6.
// Deterministic for a fixed seed.
CertifyReport certify_continuous_feasibility(const HGrid& grid, Model family,
                                             double gamma, int num_samples,
                                             std::uint64_t seed);

}  // namespace lm
