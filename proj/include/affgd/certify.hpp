#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "affgd/engine.hpp"

namespace affgd {

enum class Verdict { Pass, Fail, HypothesesViolated };

std::string to_string(Verdict v);

/// Per-iteration evaluation of one certified inequality.
struct LyapunovRecord {
  long k = 0;
  double lyapunov = 0.0;  // value of the Lyapunov candidate at k (NaN for sampled checks)
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;  // lhs - rhs, recorded only when checked
  bool checked = false;
};

/// Inequality tolerance: absolute floor plus a relative part scaled by the
/// magnitude of the larger side.
struct ToleranceSpec {
  double absolute = 1e-10;
  double relative = 1e-9;
};

/// Outcome of one certifier. max_residual is the largest violation net of the
/// relative allowance, so the pass criterion is exactly
/// max_residual <= tolerance (the absolute floor).
struct CertReport {
  std::string inequality;
  long iters_checked = 0;
  long iters_skipped = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  Verdict verdict = Verdict::Pass;
  std::string notes;
  std::vector<LyapunovRecord> records;

  bool failed() const { return verdict == Verdict::Fail; }
};

/// V^s_k = ||x_k - x*||^2 decrease at rate
///   V^s_{k+1} - V^s_k <= -(a/L_s)(2 - a L_s)(1 + a L_s) ||grad f(x_{k+1})||^2
/// for effective stepsizes a with a L_s in (0,2). Stepsizes outside the range
/// yield a hypotheses-violated report.
CertReport check_Vs_decrease(const Trajectory& traj, const Objective& obj,
                             const Vec& x_star, double smoothness,
                             ToleranceSpec tol = {});

/// ||grad f(x_{k+1})|| <= ||grad f(x_k)|| under the same stepsize range.
CertReport check_grad_monotonicity(const Trajectory& traj, double smoothness,
                                   ToleranceSpec tol = {});

/// Two-point descent estimate replay:
///   F_{k+1} <= F_k - (1 - L_k a_k) a_k ||grad f(x_k)||^2
/// with L_k recomputed from consecutive iterates. Notes how many steps ran
/// with a negative coefficient (overshoot).
CertReport check_descent_lemma(const Trajectory& traj, const Objective& obj,
                               double f_star, ToleranceSpec tol = {});

/// Distance decrease V^s_{k+1} - V^s_k <= -2 a_k F_{k+1} on iterations whose
/// recomputed L_k a_k lies in (0, 1/2); others are skipped and counted.
CertReport check_halfrange_Vs(const Trajectory& traj, const Objective& obj,
                              const Vec& x_star, double f_star,
                              ToleranceSpec tol = {});

/// Augmented certificate for the feedback-feedforward law:
///   V^a_k = ||x_k - x*||^2 + (2 alpha_{k-1}/(1 - gamma_{k-1}^2)) F_k,
///   V^a_{k+1} - V^a_k <= -(2 gamma_k^2/(1-gamma_k^2))(alpha2_k - alpha_k) F_k
///                        - (alpha_k^2/(1-gamma_k^2)) ||grad f(x_{k+1})||^2.
/// The right side drops the (alpha_k/L_k)||grad f(x_k)||^2 term of the exact
/// certificate, a sound relaxation that avoids estimating a region-wide
/// curvature bound. Requires an unperturbed feedback-feedforward trajectory
/// with the feedback bound recorded.
CertReport check_Va_decrease(const Trajectory& traj, const Vec& x_star,
                             double f_star, ToleranceSpec tol = {});

/// Gap rate certificate, for k >= 2:
///   F_k <= (||x_0 - x*||^2 + 2 alpha_0 gamma_0^2/(1-gamma_0^2) F_0)
///          / (2 sum_{i=1}^{k-1} alpha_i).
/// Requires record_every = 1.
CertReport check_rate_bound(const Trajectory& traj, const Vec& x_star,
                            double f_star, ToleranceSpec tol = {});

/// Slack-law certificate with a_k in (0, gamma_k]:
///   V^p_k = ||x_k - x*||^2 + (alpha_{k-1}/alpha_k)^2 ||x_{k+1} - x_k||^2,
///   V^p_{k+1} - V^p_k <= -((alpha_{k-1}/alpha_k)^2 - gamma_k^2/a_k^2)
///                          ||x_{k+1} - x_k||^2 - 2 alpha_k F_{k+1}.
/// The ratio enters squared: that is the form under which the two
/// ||x_{k+2} - x_{k+1}||^2 terms cancel exactly in the telescoping.
/// Needs x_{k+2}, so the check stops two steps early. Scalars broadcast.
CertReport check_Vp_decrease(const Trajectory& traj, const Vec& x_star,
                             double f_star, std::span<const double> gamma_seq,
                             std::span<const double> a_seq, ToleranceSpec tol = {});

/// Monte-Carlo cocoercivity:
///   f(y) >= f(x) + <grad f(x), y - x> + (1/(2 L_s)) ||grad f(y) - grad f(x)||^2.
CertReport check_cocoercivity(const Objective& obj, double smoothness,
                              long n_pairs, std::uint64_t seed,
                              ToleranceSpec tol = {});

/// Monte-Carlo convexity: f(y) >= f(x) + <grad f(x), y - x>.
CertReport check_convexity(const Objective& obj, long n_pairs, std::uint64_t seed,
                           ToleranceSpec tol = {});

/// Monte-Carlo two-point upper estimate:
///   f(y) <= f(x) + <grad f(x), y - x> + L(y,x) ||y - x||^2.
CertReport check_estimate_upper_bound(const Objective& obj, long n_pairs,
                                      std::uint64_t seed, ToleranceSpec tol = {});

/// Qualitative sublinear-rate certificate: k * F_k and k * ||grad f(x_k)||
/// over the last half of the trajectory stay below `factor` times their
/// median there (plus a small noise floor so convergence to the FP noise
/// level is not misread as growth). Asymptotic vanishing itself is not
/// machine-checkable on a finite run; the report notes that.
CertReport check_theorem1_rates(const Trajectory& traj, double smoothness,
                                double f_star, double factor = 10.0);

/// Post-hoc feasibility replay for unperturbed feedback-feedforward runs:
/// every recorded stepsize satisfies alpha_k L_k <= gamma_k (L_k recomputed
/// from the realized pair) and alpha_k <= alpha2_k.
CertReport check_affgd_feasibility(const Trajectory& traj, const Objective& obj,
                                   ToleranceSpec tol = {});

/// CSV schema: "inequality,iters_checked,iters_skipped,max_residual,tolerance,verdict".
std::string cert_csv(const std::vector<CertReport>& reports);
/// Human-readable fixed-width table.
std::string cert_table(const std::vector<CertReport>& reports);

}  // namespace affgd
