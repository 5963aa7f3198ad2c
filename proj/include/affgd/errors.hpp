#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace affgd {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A caller violated an operation's preconditions.
struct InvalidArgumentError : Error {
  using Error::Error;
};

/// An operation was invoked in a state or mode it does not support.
struct InvalidUsageError : Error {
  using Error::Error;
};

/// Two-point curvature probe with coincident points or a vanishing gradient.
struct DegenerateProbeError : Error {
  using Error::Error;
};

/// Backtracking exhausted its budget without finding a feasible stepsize.
struct LinesearchError : Error {
  using Error::Error;
};

/// Dataset generation could not satisfy its postconditions.
struct GenerationError : Error {
  using Error::Error;
};

/// Iterative refinement missed its tolerance; carries the best iterate seen.
struct ConvergenceError : Error {
  ConvergenceError(const std::string& what, std::vector<double> point,
                   double value, double grad_norm)
      : Error(what),
        best_point(std::move(point)),
        best_value(value),
        best_grad_norm(grad_norm) {}

  std::vector<double> best_point;
  double best_value;
  double best_grad_norm;
};

}  // namespace affgd
