#include "wkappa/sample_size.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "wkappa/error.hpp"
#include "wkappa/numerics.hpp"

namespace wkappa {

double sample_size_exact(const AccuracyEstimates& acc, const KappaPair& kp, double c,
                         double phi, double conf) {
  if (!(phi > 0.0)) throw Error(ErrorCode::Domain, "precision must be positive");
  if (!(kp.kappa2 > 0.0)) {
    throw Error(ErrorCode::RatioUndefined, "sample size needs kappa2 > 0");
  }
  const double p = acc.p;
  const double q = acc.q();
  const double y1 = acc.youden(1);
  const double y2 = acc.youden(2);
  if (!(y1 > kYoudenTolerance) || !(y2 > kYoudenTolerance)) {
    throw Error(ErrorCode::DegenerateVariance, "sample size needs both Youden indices > 0");
  }
  const double z = critical_value(conf);
  const double theta = kp.kappa1 / kp.kappa2;
  const double kappa[2] = {kp.kappa1, kp.kappa2};

  double a[2][3];
  for (int h = 0; h < 2; ++h) {
    a[h][0] = p * q - p * (q - c) * kappa[h];
    a[h][1] = a[h][0] + (q - c) * kappa[h];
    a[h][2] = (1.0 - 2.0 * p) * acc.youden(h + 1) -
              ((1.0 - c - 2.0 * p) * acc.youden(h + 1) + acc.sp(h + 1) + c - 1.0) * kappa[h];
  }

  double sum = 0.0;
  for (int h = 0; h < 2; ++h) {
    const double se = acc.se(h + 1);
    const double sp = acc.sp(h + 1);
    const double y = acc.youden(h + 1);
    sum += (a[h][0] * a[h][0] * se * (1.0 - se) * q + a[h][1] * a[h][1] * sp * (1.0 - sp) * p +
            a[h][2] * a[h][2] * p * p * q * q) /
           (y * y);
  }
  const double cross = a[0][0] * a[1][0] * acc.eps1 * q + a[0][1] * a[1][1] * acc.eps0 * p +
                       a[0][2] * a[1][2] * p * p * q * q;
  const double braces = sum - 2.0 / (y1 * y2) * cross;
  return z * z * theta * theta / (phi * phi * p * p * p * q * q * q) * braces;
}

std::int64_t required_sample_size(const AccuracyEstimates& acc, const KappaPair& kp, double c,
                                  double phi, double conf) {
  const double n = sample_size_exact(acc, kp, c, phi, conf);
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(n)));
}

bool precision_reached(const ConfidenceInterval& ci, double phi) {
  return ci.half_width() <= phi;
}

double precision_for_inverse(double theta_hat, double phi_prime) {
  return theta_hat * theta_hat * phi_prime;
}

SampleSizePlan plan_iteration(const PairedCounts& counts, double c, double phi, double conf,
                              const ConfidenceConfig& config, int round) {
  if (!(phi > 0.0)) throw Error(ErrorCode::Domain, "precision must be positive");
  SampleSizePlan plan;
  plan.phi = phi;
  plan.conf = conf;
  plan.iterations = round;
  plan.pilot_n = static_cast<std::int64_t>(std::llround(counts.n()));

  ConfidenceConfig cfg = config;
  cfg.conf = conf;
  cfg.continuity_correction = config.continuity_correction || counts.n() < kSmallPilot;
  plan.corrected = cfg.continuity_correction;

  plan.wald = wald_ratio_ci(counts, c, cfg);
  plan.theta_hat = plan.wald.point;
  if (plan.wald.contains(1.0) && !(counts.n() < kSmallPilot)) {
    plan.warnings.push_back(
        "Wald interval for the ratio contains 1: equality of the two kappas is not rejected, "
        "so sizing the study to estimate the ratio may be pointless");
  }
  if (plan.theta_hat > 1.0) {
    plan.warnings.push_back(fmt::format(
        "estimated ratio {:.3f} exceeds 1; for precision phi' on the inverse ratio swap the "
        "tests or use phi = theta^2 * phi'",
        plan.theta_hat));
  }

  if (precision_reached(plan.wald, phi)) {
    plan.achieved = true;
    plan.n_required = plan.pilot_n;
    return plan;
  }
  const PairedCounts used = cfg.continuity_correction ? apply_continuity_correction(counts) : counts;
  const AccuracyEstimates acc = accuracy_from_counts(used);
  const KappaPair kp = kappa_pair(acc, c);
  plan.n_exact = sample_size_exact(acc, kp, c, phi, conf);
  plan.n_required = std::max<std::int64_t>(
      plan.pilot_n, static_cast<std::int64_t>(std::ceil(plan.n_exact)));
  return plan;
}

}  // namespace wkappa
