#pragma once

#include "affgd/objective.hpp"

namespace affgd {

/// f(x) = (1/2) x^T m x + b^T x for symmetric PSD m. Sets `smoothness` to
/// lambda_max(m) and keeps m/b on the bundle for exact curvature probes and
/// direct reference solves. Throws InvalidArgumentError when m is not
/// symmetric (or clearly not PSD).
Objective quadratic_objective(Matrix m, Vec b);

}  // namespace affgd
