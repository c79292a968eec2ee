#ifndef BELIEFVAR_ADJUSTMENTS_HPP
#define BELIEFVAR_ADJUSTMENTS_HPP

#include <cmath>
#include <utility>

#include "beliefvar/delta.hpp"
#include "beliefvar/doubling.hpp"
#include "beliefvar/errors.hpp"
#include "beliefvar/inference.hpp"

namespace beliefvar {

/// Central moments of the pair (Q, R): Q the conditional query response,
/// R the unconditional evidence probability. The third and fourth entries
/// are the beta-motivated approximations, not exact values.
struct MomentSet {
  double mu_q = 0.0, mu_r = 1.0;
  double sigma_qq = 0.0, sigma_rr = 0.0, sigma_qr = 0.0;
  double sigma_qqr = 0.0, sigma_qrr = 0.0, sigma_qqrr = 0.0;
};

/// Estimated covariance of (Q, R) recovered from the gap between the one-
/// and two-observation query means. With mu_r = 1 the covariance is 0 by
/// construction; with a degenerate denominator the sigma_rr = 0
/// simplification (q2 - q1) * mu_r is used instead.
inline double sigma_qr_hat(double q1, double q2, double mu_r,
                           double sigma_rr) {
  if (mu_r == 1.0) return 0.0;
  const double d2 = mu_r * (1.0 - mu_r) + sigma_rr;
  const double denom = mu_r * mu_r * mu_r * (1.0 - mu_r) +
                       mu_r * (1.0 - 2.0 * mu_r) * sigma_rr -
                       sigma_rr * sigma_rr;
  if (std::abs(denom) < 1e-14) return (q2 - q1) * mu_r;
  return (q2 - q1) * mu_r * (mu_r * mu_r + sigma_rr) * d2 / denom;
}

/// Bias-corrected means: q3 = 2 q1 - q2 and q4 = q1 - sigma_qr / mu_r.
inline std::pair<double, double> adjusted_means(double q1, double q2,
                                                double mu_r, double sigma_rr) {
  const double q3 = 2.0 * q1 - q2;
  const double q4 = q1 - sigma_qr_hat(q1, q2, mu_r, sigma_rr) / mu_r;
  return {q3, q4};
}

/// Beta-motivated higher-moment approximations:
///   sigma_qqr  ~ 2 sigma_qr sigma_qq (1 - 2 mu_q) / (mu_q(1-mu_q) + sigma_qq)
///   sigma_qrr  ~ same with the roles of Q and R switched
///   sigma_qqrr ~ 2 sigma_qr^2 + sigma_qq sigma_rr
inline MomentSet moment_approximations(double mu_q, double mu_r,
                                       double sigma_qq, double sigma_rr,
                                       double sigma_qr) {
  MomentSet m;
  m.mu_q = mu_q;
  m.mu_r = mu_r;
  m.sigma_qq = sigma_qq;
  m.sigma_rr = sigma_rr;
  m.sigma_qr = sigma_qr;
  const double dq = mu_q * (1.0 - mu_q) + sigma_qq;
  const double dr = mu_r * (1.0 - mu_r) + sigma_rr;
  m.sigma_qqr = dq > 0.0 ? 2.0 * sigma_qr * sigma_qq * (1.0 - 2.0 * mu_q) / dq
                         : 0.0;
  m.sigma_qrr = dr > 0.0 ? 2.0 * sigma_qr * sigma_rr * (1.0 - 2.0 * mu_r) / dr
                         : 0.0;
  m.sigma_qqrr = 2.0 * sigma_qr * sigma_qr + sigma_qq * sigma_rr;
  return m;
}

/// Outcome of one fixed-point solve.
struct FixedPointResult {
  double value = 0.0;
  int iterations = 0;
  bool converged = true;
  int oscillation_averages = 0;
};

namespace detail {

constexpr double kFixedPointTol = 1e-12;
constexpr int kFixedPointCap = 100;

/// Plain iteration of v <- numerator / (base + corr_num / (q(1-q) + v)),
/// started at v2. Oscillation is damped by averaging the last two iterates
/// once and continuing.
inline FixedPointResult solve_variance_fixed_point(double numerator,
                                                   double base,
                                                   double corr_num, double q,
                                                   double v2) {
  FixedPointResult r;
  double v = v2;
  if (corr_num == 0.0) {
    if (base == 0.0) throw DegenerateQuery("degenerate variance identity");
    r.value = numerator / base;
    return r;
  }
  double prev_delta = 0.0;
  bool have_prev = false;
  for (int it = 1; it <= kFixedPointCap; ++it) {
    const double gap = q * (1.0 - q) + v;
    if (gap == 0.0)
      throw DegenerateQuery("q(1-q) + v vanished in the variance iteration");
    const double raw = numerator / (base + corr_num / gap);
    r.iterations = it;
    if (std::abs(raw - v) < kFixedPointTol) {
      r.value = raw;
      return r;
    }
    const double delta = raw - v;
    if (have_prev && delta * prev_delta < 0.0) {
      v = 0.5 * (raw + v);
      ++r.oscillation_averages;
    } else {
      v = raw;
    }
    prev_delta = delta;
    have_prev = true;
  }
  r.value = v;
  r.converged = false;
  return r;
}

}  // namespace detail

/// Simple adjusted variance v3: the fixed point of
///   v = {v2 + 2 (q2-q1)^2} / [1 + 4 (q2-q1)(1-2 q3) / {q3(1-q3) + v}].
inline FixedPointResult adjusted_variance_v3(double q1, double q2, double q3,
                                             double v2) {
  if (q2 == q1) {
    FixedPointResult r;
    r.value = v2;
    return r;
  }
  const double numerator = v2 + 2.0 * (q2 - q1) * (q2 - q1);
  const double corr_num = 4.0 * (q2 - q1) * (1.0 - 2.0 * q3);
  return detail::solve_variance_fixed_point(numerator, 1.0, corr_num, q3, v2);
}

/// Full adjusted variance v4: the fixed point of
///   v = [(mu_r^2+s_rr){v2+(q2-q4)^2} - 2 s_qr^2]
///       / [mu_r^2+s_rr + 4 mu_r s_qr (1-2 q4) / {q4(1-q4) + v}].
inline FixedPointResult adjusted_variance_v4(double q2, double q4,
                                             double sigma_qr, double mu_r,
                                             double sigma_rr, double v2) {
  const double mr2 = mu_r * mu_r + sigma_rr;
  const double numerator =
      mr2 * (v2 + (q2 - q4) * (q2 - q4)) - 2.0 * sigma_qr * sigma_qr;
  const double corr_num = 4.0 * mu_r * sigma_qr * (1.0 - 2.0 * q4);
  return detail::solve_variance_fixed_point(numerator, mr2, corr_num, q4, v2);
}

/// All estimates for one query, plus iteration diagnostics.
struct EstimateBundle {
  double q1 = 0.0, q2 = 0.0, q3 = 0.0, q4 = 0.0;
  double v1 = 0.0, v2 = 0.0, v3 = 0.0, v4 = 0.0;
  double mu_r = 1.0, sigma_rr = 0.0;
  double sigma_qr = 0.0;
  FixedPointResult v3_solve, v4_solve;
  int clamp_events = 0;
};

/// Runs the whole pipeline: plug-in mean, doubling, delta method, then the
/// adjusted means and variances. Adjusted means are clamped to [0, 1] and
/// variances to >= 0, with a counter so tests can insist no clamping
/// happened.
inline EstimateBundle full_bundle(const Network& net, const DoubledNetwork& dbl,
                                  const Query& q) {
  EstimateBundle out;

  // Plug-in pass: kept-factor mass doubles as the evidence probability.
  out.q1 = estimate_q1(net, q);

  const DoublingEstimates est = doubled_query_estimates(dbl, q);
  out.q2 = est.q2;
  out.v2 = est.v2;

  if (q.evidence.empty()) {
    out.mu_r = 1.0;
    out.sigma_rr = 0.0;
  } else {
    out.mu_r = evidence_probability(net, net.posterior_means(), q.evidence);
    out.sigma_rr =
        std::max(0.0, est.evidence_pair_prob - out.mu_r * out.mu_r);
  }

  out.v1 = variance_v1(net, q);

  out.sigma_qr = sigma_qr_hat(out.q1, out.q2, out.mu_r, out.sigma_rr);
  auto [q3, q4] = adjusted_means(out.q1, out.q2, out.mu_r, out.sigma_rr);
  const auto clamp01 = [&out](double x) {
    if (x < 0.0 || x > 1.0) ++out.clamp_events;
    return std::min(1.0, std::max(0.0, x));
  };
  out.q3 = clamp01(q3);
  out.q4 = clamp01(q4);

  out.v3_solve = adjusted_variance_v3(out.q1, out.q2, out.q3, out.v2);
  out.v4_solve = adjusted_variance_v4(out.q2, out.q4, out.sigma_qr, out.mu_r,
                                      out.sigma_rr, out.v2);
  const auto clamp_var = [&out](double x) {
    if (x < 0.0) ++out.clamp_events;
    return std::max(0.0, x);
  };
  out.v3 = clamp_var(out.v3_solve.value);
  out.v4 = clamp_var(out.v4_solve.value);
  return out;
}

inline EstimateBundle full_bundle(const Network& net, const Query& q) {
  return full_bundle(net, DoubledNetwork(net), q);
}

}  // namespace beliefvar

#endif  // BELIEFVAR_ADJUSTMENTS_HPP
