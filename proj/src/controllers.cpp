#include "affgd/controllers.hpp"

#include <cmath>

#include "affgd/errors.hpp"
#include "affgd/rng.hpp"

namespace affgd {

std::string to_string(ActiveBound b) {
  switch (b) {
    case ActiveBound::None: return "none";
    case ActiveBound::First: return "first";
    case ActiveBound::Second: return "second";
    case ActiveBound::Tie: return "tie";
  }
  return "none";
}

void ControllerState::validate() const {
  if (!(alpha_prev > 0.0) || !std::isfinite(alpha_prev))
    throw InvalidArgumentError("controller state: alpha_prev must be positive and finite");
  if (!(gamma_prev > 0.0 && gamma_prev < 1.0))
    throw InvalidArgumentError("controller state: gamma_prev must lie in (0,1)");
  if (!(gamma_curr > 0.0 && gamma_curr < 1.0))
    throw InvalidArgumentError("controller state: gamma_curr must lie in (0,1)");
  if (!(theta > 0.0 && theta < 1.0))
    throw InvalidArgumentError("controller state: theta must lie in (0,1)");
}

void GammaSchedule::validate() const {
  if (!(gamma0 > 0.0 && gamma0 < 1.0))
    throw InvalidArgumentError("gamma schedule: gamma0 must lie in (0,1)");
  if (!(theta > 0.0 && theta < 1.0))
    throw InvalidArgumentError("gamma schedule: theta must lie in (0,1)");
  if (!(gamma_min > 0.0 && gamma_min <= gamma_max && gamma_max < 1.0))
    throw InvalidArgumentError("gamma schedule: need 0 < gamma_min <= gamma_max < 1");
}

void PerturbationSpec::validate() const {
  if (!(delta >= 0.0) || !std::isfinite(delta))
    throw InvalidArgumentError("perturbation: delta must be finite and >= 0");
  for (double a : a_seq)
    if (!(a > 0.0 && a <= 1.0))
      throw InvalidArgumentError("perturbation: slack factors must lie in (0,1]");
}

double alpha2_bound(double alpha_prev, double gamma_curr, double gamma_prev) {
  if (!(alpha_prev > 0.0))
    throw InvalidArgumentError("alpha2_bound: alpha_prev must be positive");
  if (!(gamma_curr > 0.0 && gamma_curr < 1.0) || !(gamma_prev > 0.0 && gamma_prev < 1.0))
    throw InvalidArgumentError("alpha2_bound: contraction factors must lie in (0,1)");
  return alpha_prev / (gamma_curr * gamma_curr) * (1.0 - gamma_curr * gamma_curr) /
         (1.0 - gamma_prev * gamma_prev);
}

namespace {

constexpr double kTieRel = 1e-9;

ActiveBound classify_bound(double alpha, double cap, bool hit_cap) {
  if (hit_cap) return ActiveBound::Second;
  if (alpha < cap * (1.0 - kTieRel)) return ActiveBound::First;
  return ActiveBound::Tie;
}

}  // namespace

AffgdStepResult affgd_step(const ControllerState& state, const Objective& obj,
                           const Vec& x, double shrink, long ls_max_iter) {
  const Vec grad = obj.gradient(x);
  return affgd_step_at(state, obj, x, grad, nrm2(grad), shrink, ls_max_iter);
}

AffgdStepResult affgd_step_at(const ControllerState& state, const Objective& obj,
                              const Vec& x, const Vec& grad, double grad_norm,
                              double shrink, long ls_max_iter) {
  state.validate();
  AffgdStepResult result;
  result.alpha2 = alpha2_bound(state.alpha_prev, state.gamma_curr, state.gamma_prev);
  result.linesearch = solve_alpha1_at(obj, x, grad, grad_norm, state.gamma_curr,
                                      result.alpha2, shrink, ls_max_iter);
  result.alpha = result.linesearch.accepted_alpha;

  result.state = state;
  result.state.alpha_prev = result.alpha;
  result.state.gamma_prev = state.gamma_curr;
  result.state.active_bound =
      classify_bound(result.alpha, result.alpha2, result.linesearch.hit_cap);
  result.state.iteration = state.iteration + 1;
  return result;
}

double update_gamma(const ControllerState& state, const GammaSchedule& schedule) {
  schedule.validate();
  if (schedule.mode == GammaMode::Constant)
    throw InvalidUsageError("update_gamma: schedule is constant");
  if (state.active_bound == ActiveBound::None)
    throw InvalidUsageError("update_gamma: no classified bound on the state");
  double g = state.gamma_curr;
  switch (state.active_bound) {
    case ActiveBound::First: g = state.gamma_curr / schedule.theta; break;
    case ActiveBound::Second: g = schedule.theta * state.gamma_curr; break;
    case ActiveBound::Tie:
    case ActiveBound::None: break;
  }
  return std::min(schedule.gamma_max, std::max(schedule.gamma_min, g));
}

double constant_step(double smoothness) {
  if (!(smoothness > 0.0))
    throw InvalidArgumentError("constant_step: smoothness must be positive");
  return 1.0 / smoothness;
}

double tv_open_loop(double smoothness, long k, double horizon_scale) {
  if (!(smoothness > 0.0))
    throw InvalidArgumentError("tv_open_loop: smoothness must be positive");
  if (k < 0) throw InvalidArgumentError("tv_open_loop: k must be non-negative");
  if (!(horizon_scale > 0.0))
    throw InvalidArgumentError("tv_open_loop: horizon_scale must be positive");
  return (2.0 - 1.0 / (1.0 + static_cast<double>(k) / horizon_scale)) / smoothness;
}

double bls_step(const Objective& obj, const Vec& x, double gamma, double cap) {
  return solve_alpha1(obj, x, gamma, cap).accepted_alpha;
}

double robust_growth_cap(double alpha_candidate, double alpha_prev,
                         double gamma, double a) {
  if (!(alpha_prev > 0.0))
    throw InvalidArgumentError("robust_growth_cap: alpha_prev must be positive");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw InvalidArgumentError("robust_growth_cap: gamma must lie in (0,1)");
  if (!(a > 0.0 && a <= gamma))
    throw InvalidArgumentError("robust_growth_cap: slack must lie in (0, gamma]");
  return std::min(alpha_candidate, (a / gamma) * alpha_prev);
}

ScaledGammaRebound scaled_gamma_rebound(double gamma, double a) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw InvalidArgumentError("scaled_gamma_rebound: gamma must lie in (0,1)");
  if (!(a > gamma && a < 1.0))
    throw InvalidArgumentError("scaled_gamma_rebound: slack must lie in (gamma, 1)");
  return {gamma / a};
}

std::string to_string(ControllerKind k) {
  switch (k) {
    case ControllerKind::ConstantGD: return "gd";
    case ControllerKind::TvOpenLoop: return "tv";
    case ControllerKind::Affgd: return "affgd";
    case ControllerKind::Bls: return "bls";
    case ControllerKind::PertLaw: return "pertlaw";
    case ControllerKind::RandomStep: return "random";
    case ControllerKind::AdGD: return "adgd";
    case ControllerKind::AdaGM: return "adagm";
  }
  return "unknown";
}

namespace {

double require_smoothness(const Objective& obj, const char* who) {
  if (!obj.smoothness || !(*obj.smoothness > 0.0))
    throw InvalidArgumentError(std::string(who) +
                               ": objective must carry a positive smoothness constant");
  return *obj.smoothness;
}

class ConstantGDPolicy final : public StepPolicy {
 public:
  explicit ConstantGDPolicy(double alpha) : alpha_(alpha) {}
  StepDecision next(const Objective&, const Vec&, const Vec&, double, long) override {
    StepDecision d;
    d.alpha = alpha_;
    return d;
  }

 private:
  double alpha_;
};

class TvOpenLoopPolicy final : public StepPolicy {
 public:
  TvOpenLoopPolicy(double smoothness, double scale, double horizon)
      : smoothness_(smoothness), scale_(scale), horizon_(horizon) {}
  StepDecision next(const Objective&, const Vec&, const Vec&, double, long k) override {
    StepDecision d;
    d.alpha = scale_ * tv_open_loop(smoothness_, k, horizon_);
    return d;
  }

 private:
  double smoothness_;
  double scale_;
  double horizon_;
};

class AffgdPolicy final : public StepPolicy {
 public:
  explicit AffgdPolicy(const ControllerConfig& config)
      : schedule_(config.schedule()), shrink_(config.shrink),
        ls_max_iter_(config.ls_max_iter) {
    schedule_.validate();
    state_.alpha_prev = config.alpha_init;
    state_.gamma_prev = config.gamma;
    state_.gamma_curr = config.gamma;
    state_.theta = config.theta;
    state_.validate();
  }

  StepDecision next(const Objective& obj, const Vec& x, const Vec& grad,
                    double grad_norm, long) override {
    const AffgdStepResult step =
        affgd_step_at(state_, obj, x, grad, grad_norm, shrink_, ls_max_iter_);
    StepDecision d;
    d.alpha = step.alpha;
    d.gamma = state_.gamma_curr;
    d.alpha2 = step.alpha2;
    d.bound = step.state.active_bound;
    state_ = step.state;
    if (schedule_.mode == GammaMode::Adaptive)
      state_.gamma_curr = update_gamma(state_, schedule_);
    return d;
  }

 private:
  ControllerState state_;
  GammaSchedule schedule_;
  double shrink_;
  long ls_max_iter_;
};

class BlsPolicy final : public StepPolicy {
 public:
  BlsPolicy(double gamma, double cap, double shrink, long ls_max_iter)
      : gamma_(gamma), cap_(cap), shrink_(shrink), ls_max_iter_(ls_max_iter) {
    if (!(gamma_ > 0.0 && gamma_ < 1.0))
      throw InvalidArgumentError("bls policy: gamma must lie in (0,1)");
    if (!(cap_ > 0.0)) throw InvalidArgumentError("bls policy: cap must be positive");
  }

  StepDecision next(const Objective& obj, const Vec& x, const Vec& grad,
                    double grad_norm, long) override {
    StepDecision d;
    d.alpha = solve_alpha1_at(obj, x, grad, grad_norm, gamma_, cap_, shrink_,
                              ls_max_iter_)
                  .accepted_alpha;
    d.gamma = gamma_;
    return d;
  }

 private:
  double gamma_;
  double cap_;
  double shrink_;
  long ls_max_iter_;
};

/// Slack law: resolves the feedforward bound against the loosened threshold
/// gamma/a_k while growing at most by the factor a_k/gamma per step, so the
/// realized stepsize satisfies both alpha L <= gamma/a_k and the growth cap.
class PertLawPolicy final : public StepPolicy {
 public:
  PertLawPolicy(const ControllerConfig& config, const PerturbationSpec& perturbation)
      : gamma_(config.gamma), fallback_a_(config.a), alpha_prev_(config.alpha_init),
        shrink_(config.shrink), ls_max_iter_(config.ls_max_iter),
        a_seq_(perturbation.a_seq) {
    if (!(gamma_ > 0.0 && gamma_ < 1.0))
      throw InvalidArgumentError("slack-law policy: gamma must lie in (0,1)");
    if (!(fallback_a_ > 0.0 && fallback_a_ <= gamma_))
      throw InvalidArgumentError("slack-law policy: slack must lie in (0, gamma]");
    if (!(alpha_prev_ > 0.0))
      throw InvalidArgumentError("slack-law policy: alpha_init must be positive");
  }

  StepDecision next(const Objective& obj, const Vec& x, const Vec& grad,
                    double grad_norm, long k) override {
    PerturbationSpec lookup;
    lookup.a_seq = a_seq_;
    const double a = lookup.a_at(static_cast<std::size_t>(k), fallback_a_);
    if (!(a > 0.0 && a <= gamma_))
      throw InvalidArgumentError("slack-law policy: slack must lie in (0, gamma]");
    const double cap = (a / gamma_) * alpha_prev_;
    const LinesearchResult ls = solve_alpha1_at(obj, x, grad, grad_norm, gamma_ / a,
                                                cap, shrink_, ls_max_iter_);
    StepDecision d;
    d.alpha = ls.accepted_alpha;
    d.gamma = gamma_;
    d.alpha2 = cap;
    d.bound = classify_bound(d.alpha, cap, ls.hit_cap);
    alpha_prev_ = d.alpha;
    return d;
  }

 private:
  double gamma_;
  double fallback_a_;
  double alpha_prev_;
  double shrink_;
  long ls_max_iter_;
  std::vector<double> a_seq_;
};

class RandomStepPolicy final : public StepPolicy {
 public:
  RandomStepPolicy(double smoothness, double lo, double hi, std::uint64_t seed)
      : smoothness_(smoothness), lo_(lo), hi_(hi), rng_(seed) {
    if (!(lo_ > 0.0 && lo_ < hi_))
      throw InvalidArgumentError("random-step policy: need 0 < lo < hi");
  }

  StepDecision next(const Objective&, const Vec&, const Vec&, double, long) override {
    StepDecision d;
    d.alpha = rng_.uniform(lo_, hi_) / smoothness_;
    return d;
  }

 private:
  double smoothness_;
  double lo_;
  double hi_;
  Rng rng_;
};

/// External adaptive baselines, included for benchmark comparisons only.
/// Their update rules follow the published algorithms and are not certified
/// by this library's inequality suite.
class AdaptiveBaselinePolicy final : public StepPolicy {
 public:
  AdaptiveBaselinePolicy(double alpha_init, double curvature_divisor)
      : lambda_prev_(alpha_init), divisor_(curvature_divisor) {
    if (!(lambda_prev_ > 0.0))
      throw InvalidArgumentError("adaptive baseline: alpha_init must be positive");
  }

  StepDecision next(const Objective&, const Vec& x, const Vec& grad, double,
                    long k) override {
    StepDecision d;
    if (k == 0) {
      d.alpha = lambda_prev_;
    } else {
      const double dx = dist(x, x_prev_);
      const double dg = dist(grad, g_prev_);
      const double inv_curv = (dx > 0.0 && dg > 0.0)
                                  ? dx / (divisor_ * dg)
                                  : std::numeric_limits<double>::infinity();
      const double growth = std::isinf(theta_prev_)
                                ? std::numeric_limits<double>::infinity()
                                : std::sqrt(1.0 + theta_prev_) * lambda_prev_;
      const double lambda = std::min(growth, inv_curv);
      theta_prev_ = lambda / lambda_prev_;
      lambda_prev_ = lambda;
      d.alpha = lambda;
    }
    x_prev_ = x;
    g_prev_ = grad;
    return d;
  }

 private:
  double lambda_prev_;
  double divisor_;
  double theta_prev_ = std::numeric_limits<double>::infinity();
  Vec x_prev_;
  Vec g_prev_;
};

}  // namespace

std::unique_ptr<StepPolicy> make_policy(const ControllerConfig& config,
                                        const Objective& obj,
                                        const PerturbationSpec& perturbation) {
  perturbation.validate();
  switch (config.kind) {
    case ControllerKind::ConstantGD:
      return std::make_unique<ConstantGDPolicy>(
          config.alpha_scale * constant_step(require_smoothness(obj, "gd policy")));
    case ControllerKind::TvOpenLoop:
      return std::make_unique<TvOpenLoopPolicy>(
          require_smoothness(obj, "tv policy"), config.alpha_scale,
          config.horizon_scale);
    case ControllerKind::Affgd:
      return std::make_unique<AffgdPolicy>(config);
    case ControllerKind::Bls:
      return std::make_unique<BlsPolicy>(config.gamma, config.bls_cap, config.shrink,
                                         config.ls_max_iter);
    case ControllerKind::PertLaw:
      return std::make_unique<PertLawPolicy>(config, perturbation);
    case ControllerKind::RandomStep:
      return std::make_unique<RandomStepPolicy>(
          require_smoothness(obj, "random-step policy"), config.rand_lo,
          config.rand_hi, config.rand_seed);
    case ControllerKind::AdGD:
      return std::make_unique<AdaptiveBaselinePolicy>(config.alpha_init, 2.0);
    case ControllerKind::AdaGM:
      return std::make_unique<AdaptiveBaselinePolicy>(config.alpha_init,
                                                      std::sqrt(2.0));
  }
  throw InvalidArgumentError("make_policy: unknown controller kind");
}

}  // namespace affgd
