#pragma once

// Numeric tolerances used across the library. These are part of the observable
// contract (reports, validators, acceptance checks), so they live in one place
// and are never redefined locally.
namespace lm::tol {

// Internal state invariants (level bookkeeping, primal/dual identities).
inline constexpr double kInvariant = 1e-9;

// User-facing feasibility checks (certificates, violation reports).
inline constexpr double kUserFacing = 1e-6;

// LP solutions: max constraint violation accepted as feasible.
inline constexpr double kLpFeas = 1e-7;

// LP solutions: relative optimality gap accepted as optimal.
inline constexpr double kLpOpt = 1e-6;

// Bisection / monotone root finding in price-function inversion.
inline constexpr double kRootFind = 1e-10;

// Root solves inside the hardness curve computations.
inline constexpr double kHardnessRoot = 1e-12;

// A vertex whose level is within this of 1 counts as saturated.
inline constexpr double kMinResidual = 1e-12;

}  // namespace lm::tol
