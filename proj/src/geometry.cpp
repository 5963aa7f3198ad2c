#include "affgd/geometry.hpp"

#include <cmath>

#include "affgd/errors.hpp"

namespace affgd {

double local_L(const Objective& obj, const Vec& x, const Vec& y) {
  const double d = dist(x, y);
  if (d == 0.0) throw DegenerateProbeError("local_L: coincident points");
  return dist(obj.gradient(y), obj.gradient(x)) / d;
}

double quadratic_local_L(const Matrix& m, const Vec& g) {
  const double gnorm = nrm2(g);
  if (gnorm == 0.0) throw DegenerateProbeError("quadratic_local_L: zero gradient");
  return nrm2(matvec(m, g)) / gnorm;
}

CurvatureProbe curvature_probe(const Objective& obj, const Vec& x, const Vec& grad,
                               double grad_norm, double alpha) {
  if (grad_norm <= 0.0)
    throw DegenerateProbeError("curvature_probe: zero gradient");
  if (alpha <= 0.0)
    throw InvalidArgumentError("curvature_probe: stepsize must be positive");
  const Vec y = axpy(-alpha, grad, x);
  const Vec gy = obj.gradient(y);
  CurvatureProbe p;
  p.trial_alpha = alpha;
  // Denominator alpha*||g|| = ||y - x|| by construction, without the
  // cancellation error of recomputing the difference.
  p.estimate = dist(gy, grad) / (alpha * grad_norm);
  p.condition = p.estimate * alpha;
  return p;
}

LinesearchResult solve_alpha1(const Objective& obj, const Vec& x, double gamma,
                              double cap, double shrink, long max_iter) {
  const Vec grad = obj.gradient(x);
  return solve_alpha1_at(obj, x, grad, nrm2(grad), gamma, cap, shrink, max_iter);
}

LinesearchResult solve_alpha1_at(const Objective& obj, const Vec& x, const Vec& grad,
                                 double grad_norm, double gamma, double cap,
                                 double shrink, long max_iter) {
  if (gamma <= 0.0) throw InvalidArgumentError("solve_alpha1: gamma must be positive");
  if (cap <= 0.0) throw InvalidArgumentError("solve_alpha1: cap must be positive");
  if (shrink <= 0.0 || shrink >= 1.0)
    throw InvalidArgumentError("solve_alpha1: shrink must lie in (0,1)");
  if (grad_norm <= 0.0)
    throw DegenerateProbeError("solve_alpha1: zero gradient");

  if (obj.hessian) {
    // Exact curvature: the two-point estimate of a quadratic is the same at
    // every trial stepsize, so the bound resolves in closed form.
    const double lq = quadratic_local_L(*obj.hessian, grad);
    LinesearchResult r;
    r.accepted_alpha = (lq > 0.0) ? std::min(cap, gamma / lq) : cap;
    r.local_L = lq;
    r.probes_used = 0;
    r.hit_cap = r.accepted_alpha == cap;
    return r;
  }

  double trial = cap;
  for (long j = 0; j < max_iter; ++j, trial *= shrink) {
    const CurvatureProbe p = curvature_probe(obj, x, grad, grad_norm, trial);
    if (p.condition <= gamma) {
      LinesearchResult r;
      r.accepted_alpha = trial;
      r.local_L = p.estimate;
      r.probes_used = j + 1;
      r.hit_cap = j == 0;
      return r;
    }
  }
  throw LinesearchError("solve_alpha1: no feasible stepsize within the probe budget");
}

double grid_search_alpha1(const Objective& obj, const Vec& x, double gamma,
                          double cap, long grid_points) {
  if (grid_points < 100)
    throw InvalidArgumentError("grid_search_alpha1: need at least 100 grid points");
  if (gamma <= 0.0 || cap <= 0.0)
    throw InvalidArgumentError("grid_search_alpha1: gamma and cap must be positive");
  const Vec grad = obj.gradient(x);
  const double gnorm = nrm2(grad);
  if (gnorm <= 0.0) throw DegenerateProbeError("grid_search_alpha1: zero gradient");

  const double lo = 1e-8 * cap;
  const double ratio = std::pow(cap / lo, 1.0 / static_cast<double>(grid_points - 1));
  // Scan downward so the first feasible point is the largest.
  for (long i = grid_points - 1; i >= 0; --i) {
    const double alpha = lo * std::pow(ratio, static_cast<double>(i));
    const CurvatureProbe p = curvature_probe(obj, x, grad, gnorm, alpha);
    if (p.condition <= gamma) return alpha;
  }
  throw LinesearchError("grid_search_alpha1: no feasible stepsize on the grid");
}

}  // namespace affgd
