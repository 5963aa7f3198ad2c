#pragma once

#include <string>
#include <vector>

#include "affgd/controllers.hpp"
#include "affgd/objective.hpp"

namespace affgd {

enum class ProblemKind { Logistic, Quadratic };

struct ProblemConfig {
  ProblemKind kind = ProblemKind::Logistic;
  // logistic
  std::size_t num_samples = 50;
  std::size_t dim = 2;
  std::uint64_t seed = 42;
  double flip_fraction = 0.2;
  // quadratic
  Matrix m;
  Vec b;

  bool operator==(const ProblemConfig&) const = default;
};

Objective make_objective(const ProblemConfig& problem);

struct RunConfig {
  ProblemConfig problem;
  ControllerConfig controller;
  PerturbationSpec perturbation;
  long max_iters = 100000;
  double grad_tol = 1e-10;
  long record_every = 1;
  Vec x0;                        // empty = origin
  std::size_t store_x_max_dim = 64;
};

enum class RunStatus { GradTolReached, BudgetExhausted, Diverged };

std::string to_string(RunStatus s);

struct TrajectoryPoint {
  long k = 0;
  Vec x;              // empty when dim > store_x_max_dim
  double f = 0.0;
  double gap = 0.0;   // f - f_star, NaN when no reference is attached
  double grad_norm = 0.0;
  double alpha = 0.0;      // stepsize applied at this iterate (0 on the terminal row)
  double gamma = 0.0;      // NaN for controllers without a contraction factor
  double alpha2 = 0.0;     // feedback bound at this iterate, NaN when not applicable
  ActiveBound bound = ActiveBound::None;
  double cum_alpha = 0.0;  // sum of stepsizes applied before reaching this iterate
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  RunStatus status = RunStatus::BudgetExhausted;
  RunConfig config;
  double alpha_init = 0.0;  // alpha_{-1} of the controller
  double gamma_init = 0.0;  // gamma_{-1}, NaN when not applicable
  double f_star = 0.0;      // NaN when no reference was attached
  long total_iterations = 0;
  double seconds = 0.0;
};

/// Aborted run (controller failure); carries the partial trajectory.
struct RunAbortError : Error {
  RunAbortError(const std::string& what, Trajectory partial)
      : Error(what), partial(std::move(partial)) {}
  Trajectory partial;
};

/// Single-threaded descent loop x_{k+1} = x_k - (1+delta) alpha_k grad f(x_k).
/// Records every record_every-th iterate plus the first and the terminal one.
/// Stops on ||grad f|| <= grad_tol, budget exhaustion, or divergence
/// (non-finite value/gradient or ||x||_inf > 1e12).
Trajectory run_gd(const Objective& obj, const RunConfig& config);

/// Convenience overload; builds the objective from config.problem (without a
/// reference minimizer, so gaps record as NaN).
Trajectory run_gd(const RunConfig& config);

/// Runs several controller configurations on one shared problem instance.
/// All configs must reference the same problem and x0. Runs execute in
/// parallel; outputs are ordered like the input and bit-identical to serial
/// execution.
std::vector<Trajectory> compare_runs(const Objective& obj,
                                     const std::vector<RunConfig>& configs);
std::vector<Trajectory> compare_runs(const std::vector<RunConfig>& configs);

/// CSV schema: "k,f,gap,grad_norm,alpha,gamma,active_bound,cum_alpha" plus a
/// trailing comment "# status=<grad_tol|budget|diverged>".
std::string trajectory_csv(const Trajectory& traj);
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

}  // namespace affgd
