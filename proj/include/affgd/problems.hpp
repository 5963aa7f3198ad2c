#pragma once

#include "affgd/objective.hpp"

namespace affgd {

/// Central differences per coordinate. Test instrumentation, not a
/// production gradient path.
Vec finite_diff_gradient(const Objective& obj, const Vec& x, double h = 1e-6);

struct ReferenceMinimum {
  Vec point;
  double value = 0.0;
  double grad_norm = 0.0;
  long iterations = 0;
};

/// High-accuracy minimizer used as ground truth for gap curves. Quadratics
/// with the linear term in range(M) are solved directly; everything else is
/// driven by the adaptive stepsize controller until ||grad f|| <= grad_tol
/// (ConvergenceError carrying the best iterate if the budget runs out).
ReferenceMinimum reference_minimum(const Objective& obj, double grad_tol = 1e-12,
                                   long max_iters = 1000000);

/// Copy of obj with the reference minimizer attached (gap recording on).
Objective with_reference(Objective obj, const ReferenceMinimum& ref, double grad_tol);

}  // namespace affgd
