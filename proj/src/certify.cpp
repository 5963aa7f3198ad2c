#include "affgd/certify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "affgd/geometry.hpp"
#include "affgd/rng.hpp"
#include "affgd/io.hpp"

namespace affgd {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::HypothesesViolated: return "hypotheses-violated";
  }
  return "unknown";
}

namespace {

double quiet_nan() { return std::numeric_limits<double>::quiet_NaN(); }

/// Accumulates inequality evaluations lhs <= rhs into a report. The verdict
/// compares the worst residual, net of the relative allowance, against the
/// absolute floor.
class ReportBuilder {
 public:
  ReportBuilder(std::string inequality, ToleranceSpec tol)
      : tol_(tol) {
    report_.inequality = std::move(inequality);
    report_.tolerance = tol.absolute;
  }

  void check(long k, double lyapunov, double lhs, double rhs) {
    LyapunovRecord r;
    r.k = k;
    r.lyapunov = lyapunov;
    r.lhs = lhs;
    r.rhs = rhs;
    r.residual = lhs - rhs;
    r.checked = true;
    report_.records.push_back(r);
    ++report_.iters_checked;
    const double net =
        (lhs - rhs) - tol_.relative * std::max(std::abs(lhs), std::abs(rhs));
    max_net_ = std::max(max_net_, net);
  }

  void skip(long k, double lyapunov) {
    LyapunovRecord r;
    r.k = k;
    r.lyapunov = lyapunov;
    r.checked = false;
    report_.records.push_back(r);
    ++report_.iters_skipped;
  }

  void note(const std::string& text) {
    if (!report_.notes.empty()) report_.notes += "; ";
    report_.notes += text;
  }

  CertReport finish() {
    report_.max_residual = (report_.iters_checked > 0) ? max_net_ : 0.0;
    report_.verdict =
        report_.max_residual <= tol_.absolute ? Verdict::Pass : Verdict::Fail;
    if (report_.iters_checked == 0) note("no iterations qualified; vacuous pass");
    return std::move(report_);
  }

  CertReport hypotheses_violated(const std::string& why) {
    report_.verdict = Verdict::HypothesesViolated;
    report_.iters_checked = 0;
    report_.max_residual = 0.0;
    note(why);
    return std::move(report_);
  }

 private:
  ToleranceSpec tol_;
  CertReport report_;
  double max_net_ = -std::numeric_limits<double>::infinity();
};

void require_dense(const Trajectory& traj, const char* who) {
  if (traj.config.record_every != 1)
    throw InvalidUsageError(std::string(who) +
                            ": needs a trajectory recorded at every iteration");
  for (std::size_t i = 0; i < traj.points.size(); ++i)
    if (traj.points[i].k != static_cast<long>(i))
      throw InvalidUsageError(std::string(who) + ": trajectory rows are not contiguous");
}

void require_x(const Trajectory& traj, const char* who) {
  for (const TrajectoryPoint& p : traj.points)
    if (p.x.empty())
      throw InvalidUsageError(std::string(who) +
                              ": needs stored iterates (dimension-gated off)");
}

void require_unperturbed(const Trajectory& traj, const char* who) {
  if (traj.config.perturbation.delta != 0.0)
    throw InvalidUsageError(std::string(who) +
                            ": defined for unperturbed trajectories only");
}

void require_kind(const Trajectory& traj, ControllerKind kind, const char* who) {
  if (traj.config.controller.kind != kind)
    throw InvalidUsageError(std::string(who) + ": trajectory was not produced by the " +
                            to_string(kind) + " controller");
}

double effective_delta(const Trajectory& traj) {
  return traj.config.perturbation.delta;
}

/// Number of stepping rows: every row but the terminal one carries the
/// stepsize applied there.
std::size_t step_count(const Trajectory& traj) {
  return traj.points.empty() ? 0 : traj.points.size() - 1;
}

/// Scans effective stepsizes against the smooth range L_s*alpha in (0,2).
/// Returns the first offending row, or -1 when all pass.
long find_range_violation(const Trajectory& traj, double smoothness) {
  const double factor = 1.0 + effective_delta(traj);
  for (std::size_t i = 0; i < step_count(traj); ++i) {
    const double t = smoothness * factor * traj.points[i].alpha;
    if (!(t > 0.0 && t < 2.0)) return static_cast<long>(i);
  }
  return -1;
}

std::string fmt_k(long k) { return std::to_string(k); }

}  // namespace

CertReport check_Vs_decrease(const Trajectory& traj, const Objective& obj,
                             const Vec& x_star, double smoothness,
                             ToleranceSpec tol) {
  ReportBuilder rb("Vs_decrease", tol);
  require_dense(traj, "check_Vs_decrease");
  require_x(traj, "check_Vs_decrease");
  if (x_star.size() != obj.dim)
    throw InvalidArgumentError("check_Vs_decrease: x_star dimension mismatch");
  if (!(smoothness > 0.0))
    throw InvalidArgumentError("check_Vs_decrease: smoothness must be positive");

  const long bad = find_range_violation(traj, smoothness);
  if (bad >= 0)
    return rb.hypotheses_violated("effective stepsize outside (0, 2/L_s) at k=" +
                                  fmt_k(bad));

  const double factor = 1.0 + effective_delta(traj);
  for (std::size_t i = 0; i + 1 < traj.points.size(); ++i) {
    const TrajectoryPoint& p = traj.points[i];
    const TrajectoryPoint& q = traj.points[i + 1];
    const double a = factor * p.alpha;
    const double t = smoothness * a;
    const double vk = dist2(p.x, x_star);
    const double vk1 = dist2(q.x, x_star);
    const double rhs = -(a / smoothness) * (2.0 - t) * (1.0 + t) *
                       (q.grad_norm * q.grad_norm);
    rb.check(p.k, vk, vk1 - vk, rhs);
  }
  return rb.finish();
}

CertReport check_grad_monotonicity(const Trajectory& traj, double smoothness,
                                   ToleranceSpec tol) {
  ReportBuilder rb("grad_monotonicity", tol);
  require_dense(traj, "check_grad_monotonicity");
  if (!(smoothness > 0.0))
    throw InvalidArgumentError("check_grad_monotonicity: smoothness must be positive");

  const long bad = find_range_violation(traj, smoothness);
  if (bad >= 0)
    return rb.hypotheses_violated("effective stepsize outside (0, 2/L_s) at k=" +
                                  fmt_k(bad));

  for (std::size_t i = 0; i + 1 < traj.points.size(); ++i)
    rb.check(traj.points[i].k, traj.points[i].grad_norm,
             traj.points[i + 1].grad_norm, traj.points[i].grad_norm);
  return rb.finish();
}

CertReport check_descent_lemma(const Trajectory& traj, const Objective& obj,
                               double f_star, ToleranceSpec tol) {
  ReportBuilder rb("descent_lemma", tol);
  require_dense(traj, "check_descent_lemma");
  require_x(traj, "check_descent_lemma");
  if (!std::isfinite(f_star))
    throw InvalidArgumentError("check_descent_lemma: f_star must be finite");

  const double factor = 1.0 + effective_delta(traj);
  long overshoot = 0;
  Vec g_prev;
  bool have_prev = false;
  for (std::size_t i = 0; i + 1 < traj.points.size(); ++i) {
    const TrajectoryPoint& p = traj.points[i];
    const TrajectoryPoint& q = traj.points[i + 1];
    const Vec g = have_prev ? std::move(g_prev) : obj.gradient(p.x);
    g_prev = obj.gradient(q.x);
    have_prev = true;

    const double dx = dist(p.x, q.x);
    if (dx == 0.0) {
      rb.skip(p.k, p.f - f_star);
      continue;
    }
    const double lk = dist(g_prev, g) / dx;
    const double a = factor * p.alpha;
    if (lk * a > 1.0) ++overshoot;
    const double rhs =
        (p.f - f_star) - (1.0 - lk * a) * a * (p.grad_norm * p.grad_norm);
    rb.check(p.k, p.f - f_star, q.f - f_star, rhs);
  }
  if (overshoot > 0)
    rb.note("steps with negative decrease coefficient (L_k*alpha > 1): " +
            std::to_string(overshoot));
  return rb.finish();
}

CertReport check_halfrange_Vs(const Trajectory& traj, const Objective& obj,
                              const Vec& x_star, double f_star, ToleranceSpec tol) {
  ReportBuilder rb("halfrange_Vs", tol);
  require_dense(traj, "check_halfrange_Vs");
  require_x(traj, "check_halfrange_Vs");
  if (x_star.size() != obj.dim)
    throw InvalidArgumentError("check_halfrange_Vs: x_star dimension mismatch");
  if (!std::isfinite(f_star))
    throw InvalidArgumentError("check_halfrange_Vs: f_star must be finite");

  const double factor = 1.0 + effective_delta(traj);
  Vec g_prev;
  bool have_prev = false;
  for (std::size_t i = 0; i + 1 < traj.points.size(); ++i) {
    const TrajectoryPoint& p = traj.points[i];
    const TrajectoryPoint& q = traj.points[i + 1];
    const Vec g = have_prev ? std::move(g_prev) : obj.gradient(p.x);
    g_prev = obj.gradient(q.x);
    have_prev = true;

    const double vk = dist2(p.x, x_star);
    const double dx = dist(p.x, q.x);
    const double a = factor * p.alpha;
    const double lk_a = (dx > 0.0) ? (dist(g_prev, g) / dx) * a : -1.0;
    if (!(lk_a > 0.0 && lk_a < 0.5)) {
      rb.skip(p.k, vk);
      continue;
    }
    const double rhs = -2.0 * a * (q.f - f_star);
    rb.check(p.k, vk, dist2(q.x, x_star) - vk, rhs);
  }
  return rb.finish();
}

CertReport check_Va_decrease(const Trajectory& traj, const Vec& x_star,
                             double f_star, ToleranceSpec tol) {
  ReportBuilder rb("Va_decrease", tol);
  require_dense(traj, "check_Va_decrease");
  require_x(traj, "check_Va_decrease");
  require_unperturbed(traj, "check_Va_decrease");
  require_kind(traj, ControllerKind::Affgd, "check_Va_decrease");
  if (!std::isfinite(f_star))
    throw InvalidArgumentError("check_Va_decrease: f_star must be finite");

  const auto va_weight = [](double alpha_prev, double gamma_prev) {
    return 2.0 * alpha_prev / (1.0 - gamma_prev * gamma_prev);
  };

  for (std::size_t i = 0; i + 1 < traj.points.size(); ++i) {
    const TrajectoryPoint& p = traj.points[i];
    const TrajectoryPoint& q = traj.points[i + 1];
    const double alpha_prev = (i == 0) ? traj.alpha_init : traj.points[i - 1].alpha;
    const double gamma_prev = (i == 0) ? traj.gamma_init : traj.points[i - 1].gamma;
    const double fk = p.f - f_star;
    const double fk1 = q.f - f_star;
    const double va_k = dist2(p.x, x_star) + va_weight(alpha_prev, gamma_prev) * fk;
    const double va_k1 = dist2(q.x, x_star) + va_weight(p.alpha, p.gamma) * fk1;
    const double g2 = p.gamma * p.gamma;
    const double rhs = -(2.0 * g2 / (1.0 - g2)) * (p.alpha2 - p.alpha) * fk -
                       (p.alpha * p.alpha / (1.0 - g2)) * (q.grad_norm * q.grad_norm);
    rb.check(p.k, va_k, va_k1 - va_k, rhs);
  }
  return rb.finish();
}

CertReport check_rate_bound(const Trajectory& traj, const Vec& x_star,
                            double f_star, ToleranceSpec tol) {
  ReportBuilder rb("rate_bound", tol);
  require_dense(traj, "check_rate_bound");
  require_x(traj, "check_rate_bound");
  require_unperturbed(traj, "check_rate_bound");
  require_kind(traj, ControllerKind::Affgd, "check_rate_bound");
  if (!std::isfinite(f_star))
    throw InvalidArgumentError("check_rate_bound: f_star must be finite");

  const TrajectoryPoint& p0 = traj.points.front();
  const double g0sq = p0.gamma * p0.gamma;
  const double numerator =
      dist2(p0.x, x_star) + 2.0 * p0.alpha * g0sq / (1.0 - g0sq) * (p0.f - f_star);

  for (std::size_t k = 2; k < traj.points.size(); ++k) {
    const TrajectoryPoint& p = traj.points[k];
    // cum_alpha at row k holds sum_{i<k} alpha_i exactly as accumulated by
    // the engine; subtracting alpha_0 leaves sum_{i=1}^{k-1}.
    const double tail_sum = p.cum_alpha - p0.alpha;
    rb.check(p.k, p.f - f_star, p.f - f_star, numerator / (2.0 * tail_sum));
  }
  return rb.finish();
}

CertReport check_Vp_decrease(const Trajectory& traj, const Vec& x_star,
                             double f_star, std::span<const double> gamma_seq,
                             std::span<const double> a_seq, ToleranceSpec tol) {
  ReportBuilder rb("Vp_decrease", tol);
  require_dense(traj, "check_Vp_decrease");
  require_x(traj, "check_Vp_decrease");
  require_unperturbed(traj, "check_Vp_decrease");
  require_kind(traj, ControllerKind::PertLaw, "check_Vp_decrease");
  if (gamma_seq.empty() || a_seq.empty())
    throw InvalidArgumentError("check_Vp_decrease: gamma_seq and a_seq must be non-empty");
  if (!std::isfinite(f_star))
    throw InvalidArgumentError("check_Vp_decrease: f_star must be finite");

  const auto at = [](std::span<const double> seq, std::size_t k) {
    return seq[k < seq.size() ? k : seq.size() - 1];
  };
  for (std::size_t k = 0; k < step_count(traj); ++k) {
    const double g = at(gamma_seq, k);
    const double a = at(a_seq, k);
    if (!(a > 0.0 && a <= g))
      return rb.hypotheses_violated("slack outside (0, gamma] at k=" +
                                    fmt_k(static_cast<long>(k)));
  }

  // V^p_k needs x_{k+2}, so the last two rows only feed earlier checks.
  if (traj.points.size() < 3) {
    rb.note("trajectory too short for any ratio check");
    return rb.finish();
  }
  const auto vp = [&](std::size_t k) {
    const double alpha_prev = (k == 0) ? traj.alpha_init : traj.points[k - 1].alpha;
    const double ratio = alpha_prev / traj.points[k].alpha;
    return dist2(traj.points[k].x, x_star) +
           ratio * ratio * dist2(traj.points[k + 1].x, traj.points[k].x);
  };

  for (std::size_t k = 0; k + 2 < traj.points.size(); ++k) {
    const TrajectoryPoint& p = traj.points[k];
    const TrajectoryPoint& q = traj.points[k + 1];
    const double alpha_prev = (k == 0) ? traj.alpha_init : traj.points[k - 1].alpha;
    const double ratio = alpha_prev / p.alpha;
    const double g = at(gamma_seq, k);
    const double a = at(a_seq, k);
    const double rhs = -(ratio * ratio - (g * g) / (a * a)) * dist2(q.x, p.x) -
                       2.0 * p.alpha * (q.f - f_star);
    rb.check(p.k, vp(k), vp(k + 1) - vp(k), rhs);
  }
  return rb.finish();
}

namespace {

Vec sample_point(Rng& rng, std::size_t dim) {
  Vec x(dim);
  for (double& v : x) v = rng.uniform(-5.0, 5.0);
  return x;
}

}  // namespace

CertReport check_cocoercivity(const Objective& obj, double smoothness,
                              long n_pairs, std::uint64_t seed, ToleranceSpec tol) {
  ReportBuilder rb("cocoercivity", tol);
  if (!(smoothness > 0.0))
    throw InvalidArgumentError("check_cocoercivity: smoothness must be positive");
  Rng rng(seed);
  for (long i = 0; i < n_pairs; ++i) {
    const Vec x = sample_point(rng, obj.dim);
    const Vec y = sample_point(rng, obj.dim);
    const Vec gx = obj.gradient(x);
    const Vec gy = obj.gradient(y);
    const double lhs = obj.value(x) + dot(gx, sub(y, x)) +
                       dist2(gy, gx) / (2.0 * smoothness);
    rb.check(i, quiet_nan(), lhs, obj.value(y));
  }
  return rb.finish();
}

CertReport check_convexity(const Objective& obj, long n_pairs, std::uint64_t seed,
                           ToleranceSpec tol) {
  ReportBuilder rb("convexity", tol);
  Rng rng(seed);
  for (long i = 0; i < n_pairs; ++i) {
    const Vec x = sample_point(rng, obj.dim);
    const Vec y = sample_point(rng, obj.dim);
    const double lhs = obj.value(x) + dot(obj.gradient(x), sub(y, x));
    rb.check(i, quiet_nan(), lhs, obj.value(y));
  }
  return rb.finish();
}

CertReport check_estimate_upper_bound(const Objective& obj, long n_pairs,
                                      std::uint64_t seed, ToleranceSpec tol) {
  ReportBuilder rb("two_point_upper_estimate", tol);
  Rng rng(seed);
  for (long i = 0; i < n_pairs; ++i) {
    const Vec x = sample_point(rng, obj.dim);
    const Vec y = sample_point(rng, obj.dim);
    if (x == y) {
      rb.skip(i, quiet_nan());
      continue;
    }
    const double rhs = obj.value(x) + dot(obj.gradient(x), sub(y, x)) +
                       local_L(obj, x, y) * dist2(y, x);
    rb.check(i, quiet_nan(), obj.value(y), rhs);
  }
  return rb.finish();
}

CertReport check_theorem1_rates(const Trajectory& traj, double smoothness,
                                double f_star, double factor) {
  ReportBuilder rb("theorem1_rate_products", ToleranceSpec{0.0, 0.0});
  require_dense(traj, "check_theorem1_rates");
  if (!(smoothness > 0.0))
    throw InvalidArgumentError("check_theorem1_rates: smoothness must be positive");
  if (!std::isfinite(f_star))
    throw InvalidArgumentError("check_theorem1_rates: f_star must be finite");
  if (traj.points.size() < 4)
    throw InvalidUsageError("check_theorem1_rates: trajectory too short");

  const long bad = find_range_violation(traj, smoothness);
  if (bad >= 0)
    return rb.hypotheses_violated("effective stepsize outside (0, 2/L_s) at k=" +
                                  fmt_k(bad));

  // The theorem's rate constants are not given, so the machine-checkable
  // content is qualitative: over the trailing half of the run, k*F_k and
  // k*||grad f(x_k)|| must not grow past `factor` times their level there
  // (median, or the half's first value for steeply decaying runs). The small
  // floor keeps convergence into FP noise from reading as growth.
  constexpr double kFloor = 1e-200;
  const std::size_t half = traj.points.size() / 2;
  const auto run_family = [&](const char* name, auto product) {
    std::vector<double> tail;
    for (std::size_t i = half; i < traj.points.size(); ++i)
      tail.push_back(product(traj.points[i]));
    const double level = std::max(median(tail), tail.front());
    const double bound = factor * level + kFloor;
    for (std::size_t i = half; i < traj.points.size(); ++i)
      rb.check(traj.points[i].k, quiet_nan(), product(traj.points[i]), bound);
    rb.note(std::string(name) + " level " + fmt_g17(level));
  };
  run_family("k*F_k", [&](const TrajectoryPoint& p) {
    return static_cast<double>(p.k) * (p.f - f_star);
  });
  run_family("k*grad_norm", [&](const TrajectoryPoint& p) {
    return static_cast<double>(p.k) * p.grad_norm;
  });
  rb.note("asymptotic limsup/liminf restrictions are not machine-checkable on a "
          "finite run");
  return rb.finish();
}

CertReport check_affgd_feasibility(const Trajectory& traj, const Objective& obj,
                                   ToleranceSpec tol) {
  ReportBuilder rb("affgd_feasibility", tol);
  require_dense(traj, "check_affgd_feasibility");
  require_x(traj, "check_affgd_feasibility");
  require_unperturbed(traj, "check_affgd_feasibility");
  require_kind(traj, ControllerKind::Affgd, "check_affgd_feasibility");

  Vec g_prev;
  bool have_prev = false;
  for (std::size_t i = 0; i + 1 < traj.points.size(); ++i) {
    const TrajectoryPoint& p = traj.points[i];
    const TrajectoryPoint& q = traj.points[i + 1];
    const Vec g = have_prev ? std::move(g_prev) : obj.gradient(p.x);
    g_prev = obj.gradient(q.x);
    have_prev = true;

    const double dx = dist(p.x, q.x);
    if (dx == 0.0) {
      rb.skip(p.k, p.alpha);
      continue;
    }
    const double lk = dist(g_prev, g) / dx;
    rb.check(p.k, p.alpha, p.alpha * lk, p.gamma);   // feedforward feasibility
    rb.check(p.k, p.alpha, p.alpha, p.alpha2);       // growth-cap feasibility
  }
  return rb.finish();
}

std::string cert_csv(const std::vector<CertReport>& reports) {
  std::ostringstream out;
  out << "inequality,iters_checked,iters_skipped,max_residual,tolerance,verdict\n";
  for (const CertReport& r : reports)
    out << r.inequality << ',' << r.iters_checked << ',' << r.iters_skipped << ','
        << fmt_g17(r.max_residual) << ',' << fmt_g17(r.tolerance) << ','
        << to_string(r.verdict) << '\n';
  return out.str();
}

std::string cert_table(const std::vector<CertReport>& reports) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-26s %9s %9s %13s %-19s %s\n", "inequality",
                "checked", "skipped", "max_residual", "verdict", "notes");
  out << line;
  for (const CertReport& r : reports) {
    std::snprintf(line, sizeof(line), "%-26s %9ld %9ld %13.3e %-19s %s\n",
                  r.inequality.c_str(), r.iters_checked, r.iters_skipped,
                  r.max_residual, to_string(r.verdict).c_str(), r.notes.c_str());
    out << line;
  }
  return out.str();
}

}  // namespace affgd
