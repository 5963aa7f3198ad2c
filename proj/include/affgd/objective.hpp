#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>

#include "affgd/errors.hpp"
#include "affgd/linalg.hpp"

namespace affgd {

/// Callable bundle describing a smooth convex objective.
///
/// `hessian` and `linear_term` are set for quadratics only and enable exact
/// curvature probes and direct reference solves. `opt_point`/`opt_value`
/// hold a known or precomputed minimizer; `opt_grad_tol` records the gradient
/// tolerance it was computed with.
struct Objective {
  std::size_t dim = 0;
  std::function<double(const Vec&)> value_fn;
  std::function<Vec(const Vec&)> gradient_fn;
  std::function<double(const Vec&, Vec&)> value_grad_fn;  // optional fused path

  std::optional<double> smoothness;  // global Lipschitz constant of the gradient
  std::optional<Matrix> hessian;
  std::optional<Vec> linear_term;

  std::optional<Vec> opt_point;
  std::optional<double> opt_value;
  double opt_grad_tol = std::numeric_limits<double>::quiet_NaN();

  double value(const Vec& x) const {
    check_dim(x);
    return value_fn(x);
  }

  Vec gradient(const Vec& x) const {
    check_dim(x);
    return gradient_fn(x);
  }

  double value_and_gradient(const Vec& x, Vec& grad) const {
    check_dim(x);
    if (value_grad_fn) return value_grad_fn(x, grad);
    grad = gradient_fn(x);
    return value_fn(x);
  }

  bool has_reference() const { return opt_value.has_value(); }

 private:
  void check_dim(const Vec& x) const {
    if (x.size() != dim) throw InvalidArgumentError("objective: dimension mismatch");
  }
};

}  // namespace affgd
