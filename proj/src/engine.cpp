#include "affgd/engine.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <sstream>

#include "affgd/io.hpp"
#include "affgd/logistic.hpp"
#include "affgd/quadratic.hpp"

namespace affgd {

Objective make_objective(const ProblemConfig& problem) {
  switch (problem.kind) {
    case ProblemKind::Logistic:
      return logistic_objective(make_logistic_dataset(
          problem.num_samples, problem.dim, problem.seed, problem.flip_fraction));
    case ProblemKind::Quadratic:
      return quadratic_objective(problem.m, problem.b);
  }
  throw InvalidArgumentError("make_objective: unknown problem kind");
}

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::GradTolReached: return "grad_tol";
    case RunStatus::BudgetExhausted: return "budget";
    case RunStatus::Diverged: return "diverged";
  }
  return "unknown";
}

namespace {

constexpr double kDivergenceRadius = 1e12;
// Hard floor under any requested tolerance: at an exactly zero gradient the
// curvature probes are degenerate, so the run must stop as converged first.
constexpr double kGradFloor = 1e-300;

bool has_gamma_notion(ControllerKind k) {
  return k == ControllerKind::Affgd || k == ControllerKind::Bls ||
         k == ControllerKind::PertLaw;
}

}  // namespace

Trajectory run_gd(const Objective& obj, const RunConfig& config) {
  if (config.record_every < 1)
    throw InvalidArgumentError("run_gd: record_every must be >= 1");
  if (config.max_iters < 0)
    throw InvalidArgumentError("run_gd: max_iters must be >= 0");
  if (!config.x0.empty() && config.x0.size() != obj.dim)
    throw InvalidArgumentError("run_gd: x0 dimension mismatch");

  const auto t0 = std::chrono::steady_clock::now();
  auto policy = make_policy(config.controller, obj, config.perturbation);

  Trajectory traj;
  traj.config = config;
  traj.alpha_init = config.controller.alpha_init;
  traj.gamma_init = has_gamma_notion(config.controller.kind)
                        ? config.controller.gamma
                        : std::numeric_limits<double>::quiet_NaN();
  traj.f_star = obj.opt_value.value_or(std::numeric_limits<double>::quiet_NaN());

  const bool store_x = obj.dim <= config.store_x_max_dim;
  const double step_factor = 1.0 + config.perturbation.delta;
  const double stop_tol = std::max(config.grad_tol, kGradFloor);

  Vec x = config.x0.empty() ? Vec(obj.dim, 0.0) : config.x0;
  Vec g;
  double cum_alpha = 0.0;
  long k = 0;

  const auto record = [&](double f, double gnorm, const StepDecision& d) {
    TrajectoryPoint p;
    p.k = k;
    if (store_x) p.x = x;
    p.f = f;
    p.gap = f - traj.f_star;  // NaN propagates when no reference is attached
    p.grad_norm = gnorm;
    p.alpha = d.alpha;
    p.gamma = d.gamma;
    p.alpha2 = d.alpha2;
    p.bound = d.bound;
    p.cum_alpha = cum_alpha;
    traj.points.push_back(std::move(p));
  };

  const auto finish = [&](RunStatus status, double f, double gnorm) {
    StepDecision terminal;  // alpha 0, gamma/alpha2 NaN, bound none
    record(f, gnorm, terminal);
    traj.status = status;
    traj.total_iterations = k;
    traj.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                       .count();
  };

  while (true) {
    const double f = obj.value_and_gradient(x, g);
    const double gnorm = nrm2(g);

    if (!std::isfinite(f) || !std::isfinite(gnorm) || linf_norm(x) > kDivergenceRadius) {
      finish(RunStatus::Diverged, f, gnorm);
      return traj;
    }
    if (gnorm <= stop_tol) {
      finish(RunStatus::GradTolReached, f, gnorm);
      return traj;
    }
    if (k >= config.max_iters) {
      finish(RunStatus::BudgetExhausted, f, gnorm);
      return traj;
    }

    StepDecision d;
    try {
      d = policy->next(obj, x, g, gnorm, k);
    } catch (const Error& e) {
      finish(RunStatus::BudgetExhausted, f, gnorm);
      throw RunAbortError(std::string("run_gd: controller failed at iteration ") +
                              std::to_string(k) + ": " + e.what(),
                          std::move(traj));
    }

    if (k % config.record_every == 0) record(f, gnorm, d);

    x = axpy(-step_factor * d.alpha, g, x);
    cum_alpha += d.alpha;
    ++k;
  }
}

Trajectory run_gd(const RunConfig& config) {
  return run_gd(make_objective(config.problem), config);
}

std::vector<Trajectory> compare_runs(const Objective& obj,
                                     const std::vector<RunConfig>& configs) {
  if (configs.empty())
    throw InvalidArgumentError("compare_runs: no configurations");
  for (const RunConfig& c : configs) {
    if (!(c.problem == configs.front().problem))
      throw InvalidArgumentError("compare_runs: configurations disagree on the problem");
    if (c.x0 != configs.front().x0)
      throw InvalidArgumentError("compare_runs: configurations disagree on x0");
  }

  std::vector<Trajectory> out(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(configs.size()); ++i) {
    try {
      out[static_cast<std::size_t>(i)] =
          run_gd(obj, configs[static_cast<std::size_t>(i)]);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<Trajectory> compare_runs(const std::vector<RunConfig>& configs) {
  if (configs.empty())
    throw InvalidArgumentError("compare_runs: no configurations");
  return compare_runs(make_objective(configs.front().problem), configs);
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream out;
  out << "k,f,gap,grad_norm,alpha,gamma,active_bound,cum_alpha\n";
  for (const TrajectoryPoint& p : traj.points) {
    out << p.k << ',' << fmt_g17(p.f) << ',' << fmt_g17(p.gap) << ','
        << fmt_g17(p.grad_norm) << ',' << fmt_g17(p.alpha) << ',' << fmt_g17(p.gamma)
        << ',' << to_string(p.bound) << ',' << fmt_g17(p.cum_alpha) << '\n';
  }
  out << "# status=" << to_string(traj.status) << '\n';
  return out.str();
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  write_file_atomic(path, trajectory_csv(traj));
}

}  // namespace affgd
