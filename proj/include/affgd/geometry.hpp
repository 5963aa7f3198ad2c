#pragma once

#include "affgd/objective.hpp"

namespace affgd {

/// One two-point curvature measurement along the negative gradient ray.
struct CurvatureProbe {
  double trial_alpha = 0.0;   // stepsize probed
  double estimate = 0.0;      // ||grad f(x - a g) - grad f(x)|| / (a ||g||)
  double condition = 0.0;     // trial_alpha * estimate, compared against gamma
};

struct LinesearchResult {
  double accepted_alpha = 0.0;
  double local_L = 0.0;   // curvature estimate at the accepted step
  long probes_used = 0;   // 0 when exact curvature bypassed probing
  bool hit_cap = false;   // true iff the cap itself satisfied the condition
};

/// Two-point smoothness estimate ||grad f(y) - grad f(x)|| / ||y - x||.
/// Throws DegenerateProbeError when y == x.
double local_L(const Objective& obj, const Vec& x, const Vec& y);

/// Exact directional estimate ||M g|| / ||g|| (the two-point estimate is
/// stepsize-independent for quadratics). Throws DegenerateProbeError on a
/// vanishing gradient.
double quadratic_local_L(const Matrix& m, const Vec& g);

/// Evaluates the probe at one trial stepsize.
CurvatureProbe curvature_probe(const Objective& obj, const Vec& x, const Vec& grad,
                               double grad_norm, double alpha);

/// Feedforward bound solver: the first alpha in {cap, cap*shrink, ...}
/// with alpha * L(x - alpha grad f(x), x) <= gamma. The bound is implicit
/// (the estimate depends on the trial point), hence the backtracking; the
/// accepted stepsize is feasible by construction. Objectives with an exact
/// hessian bypass probing. Throws LinesearchError after max_iter shrinks and
/// DegenerateProbeError when ||grad f(x)|| vanishes. gamma may exceed 1 for
/// slack-model laws; the classic controller uses gamma in (0,1).
LinesearchResult solve_alpha1(const Objective& obj, const Vec& x, double gamma,
                              double cap, double shrink = 0.7, long max_iter = 200);

/// As solve_alpha1 with the gradient at x precomputed.
LinesearchResult solve_alpha1_at(const Objective& obj, const Vec& x, const Vec& grad,
                                 double grad_norm, double gamma, double cap,
                                 double shrink = 0.7, long max_iter = 200);

/// Brute-force oracle: largest feasible value on a log-spaced grid over
/// [1e-8 * cap, cap]. grid_points must be >= 100.
double grid_search_alpha1(const Objective& obj, const Vec& x, double gamma,
                          double cap, long grid_points = 400);

}  // namespace affgd
