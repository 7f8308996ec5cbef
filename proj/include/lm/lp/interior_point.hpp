#pragma once

#include "lm/lp/model.hpp"

namespace lm::lp {

struct IpmOptions {
  int max_iterations = 300;
  double tolerance = 1e-9;        // relative residual and gap target
  double regularization = 1e-8;   // static primal/dual shift on the KKT system
  bool verbose = false;
};

// Mehrotra predictor-corrector interior-point method for bounded-variable
// LPs, factorizing the quasi-definite augmented KKT system with a sparse
// LDLT. Scales to the row-generation masters this project produces (tens of
// thousands of rows). Every variable must have at least one finite bound.
//
// Infeasibility is reported heuristically (stalled primal residual with
// vanishing complementarity); exact infeasibility certificates are the dense
// simplex backend's job.
LPSolution solve_interior_point(const LinearProgram& lp, const IpmOptions& options = {});

}  // namespace lm::lp
