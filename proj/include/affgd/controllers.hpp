#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <string>

#include "affgd/geometry.hpp"
#include "affgd/objective.hpp"

namespace affgd {

/// Which of the two stepsize bounds was binding on the last step.
enum class ActiveBound { None, First, Second, Tie };

std::string to_string(ActiveBound b);

/// Rolling state of the feedback-feedforward stepsize law
///   alpha_k = min{ alpha^(1), alpha^(2) },
///   alpha^(1) = gamma_k / L_k                         (feedforward),
///   alpha^(2) = (alpha_{k-1}/gamma_k^2) * (1-gamma_k^2)/(1-gamma_{k-1}^2)
///                                                     (feedback growth cap).
struct ControllerState {
  double alpha_prev = 1e-3;
  double gamma_prev = 0.7;
  double gamma_curr = 0.7;
  double theta = 0.9;
  ActiveBound active_bound = ActiveBound::None;
  long iteration = 0;

  void validate() const;
};

enum class GammaMode { Constant, Adaptive };

/// Adaptation of the contraction factor from the last active bound:
/// gamma grows (gamma/theta) after a feedforward-bound step and shrinks
/// (theta*gamma) after a growth-cap step, clamped to [gamma_min, gamma_max].
struct GammaSchedule {
  GammaMode mode = GammaMode::Constant;
  double gamma0 = 0.7;
  double theta = 0.9;
  double gamma_min = 0.05;
  double gamma_max = 0.99;

  void validate() const;
};

/// Step-injection error model: the engine applies
/// x_{k+1} = x_k - (1 + delta) alpha_k grad f(x_k). a_seq (values in (0,1])
/// models slack in the feedforward bound, alpha = gamma/(a L); empty means
/// exact.
struct PerturbationSpec {
  double delta = 0.0;
  std::vector<double> a_seq;

  double a_at(std::size_t k, double fallback) const {
    if (a_seq.empty()) return fallback;
    return a_seq[k < a_seq.size() ? k : a_seq.size() - 1];
  }
  void validate() const;
};

/// The feedback bound alpha^(2).
double alpha2_bound(double alpha_prev, double gamma_curr, double gamma_prev);

struct AffgdStepResult {
  double alpha = 0.0;
  double alpha2 = 0.0;
  LinesearchResult linesearch;
  ControllerState state;  // state after the step (gamma_curr provisional)
};

/// One step of the law above: the growth cap alpha^(2) is computed from the
/// state, the feedforward bound is resolved by backtracking capped at
/// alpha^(2), and the active bound is classified (Second when the cap itself
/// was feasible, First when the accepted stepsize is below alpha^(2) by more
/// than the 1e-9 tie tolerance, Tie otherwise).
AffgdStepResult affgd_step(const ControllerState& state, const Objective& obj,
                           const Vec& x, double shrink = 0.7, long ls_max_iter = 200);
AffgdStepResult affgd_step_at(const ControllerState& state, const Objective& obj,
                              const Vec& x, const Vec& grad, double grad_norm,
                              double shrink = 0.7, long ls_max_iter = 200);

/// Next gamma from the last active bound (Adaptive mode only; the state must
/// carry a classified bound).
double update_gamma(const ControllerState& state, const GammaSchedule& schedule);

/// Classical constant stepsize 1/L_s.
double constant_step(double smoothness);

/// Open-loop time-varying schedule (2 - 1/(1 + k/horizon_scale)) / L_s:
/// starts at 1/L_s and increases monotonically toward 2/L_s.
double tv_open_loop(double smoothness, long k, double horizon_scale = 50.0);

/// Feedforward bound alone under a fixed large cap (no growth limiting).
double bls_step(const Objective& obj, const Vec& x, double gamma, double cap);

/// Growth cap for the slack model with a in (0, gamma]:
/// min(candidate, (a/gamma) * alpha_prev).
double robust_growth_cap(double alpha_candidate, double alpha_prev,
                         double gamma, double a);

/// Slack rescaling for a in (gamma, 1): the run behaves like the exact law at
/// gamma_tilde = gamma / a, with the growth cap tightened accordingly.
struct ScaledGammaRebound {
  double gamma_tilde = 0.0;
  /// Tightened feedback bound evaluated at the rescaled factors.
  double tightened_alpha2(double alpha_prev, double gamma_tilde_prev) const {
    return alpha2_bound(alpha_prev, gamma_tilde, gamma_tilde_prev);
  }
};
ScaledGammaRebound scaled_gamma_rebound(double gamma, double a);

/// Per-step decision handed to the engine. gamma/alpha2 are NaN and bound is
/// None for controllers without that notion.
struct StepDecision {
  double alpha = 0.0;
  double gamma = std::numeric_limits<double>::quiet_NaN();
  double alpha2 = std::numeric_limits<double>::quiet_NaN();
  ActiveBound bound = ActiveBound::None;
};

class StepPolicy {
 public:
  virtual ~StepPolicy() = default;
  virtual StepDecision next(const Objective& obj, const Vec& x, const Vec& grad,
                            double grad_norm, long k) = 0;
};

enum class ControllerKind {
  ConstantGD,  // alpha = alpha_scale / L_s
  TvOpenLoop,  // alpha_k = alpha_scale * (2 - 1/(1 + k/h)) / L_s
  Affgd,       // feedback-feedforward law, constant or adaptive gamma
  Bls,         // feedforward bound only, fixed large cap
  PertLaw,     // slack law alpha = gamma/(a L) under the growth cap
  RandomStep,  // alpha ~ U(rand_lo, rand_hi) / L_s, seeded
  AdGD,        // non-normative external baseline
  AdaGM        // non-normative external baseline
};

std::string to_string(ControllerKind k);

struct ControllerConfig {
  ControllerKind kind = ControllerKind::Affgd;
  double gamma = 0.7;
  GammaMode gamma_mode = GammaMode::Constant;
  double theta = 0.9;
  double gamma_min = 0.05;
  double gamma_max = 0.99;
  double alpha_init = 1e-3;
  double shrink = 0.7;
  long ls_max_iter = 200;
  double alpha_scale = 1.0;   // ConstantGD / TvOpenLoop multiplier
  double horizon_scale = 50.0;
  double bls_cap = 1e3;
  double a = 0.4;             // PertLaw slack
  double rand_lo = 0.05;
  double rand_hi = 1.95;
  std::uint64_t rand_seed = 1234;

  bool operator==(const ControllerConfig&) const = default;
  GammaSchedule schedule() const {
    return {gamma_mode, gamma, theta, gamma_min, gamma_max};
  }
};

std::unique_ptr<StepPolicy> make_policy(const ControllerConfig& config,
                                        const Objective& obj,
                                        const PerturbationSpec& perturbation = {});

}  // namespace affgd
