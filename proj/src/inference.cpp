#include "wkappa/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <fmt/format.h>

#include "wkappa/error.hpp"
#include "wkappa/numerics.hpp"

namespace wkappa {

double KappaCovariance::var_delta() const {
  const double v = var1 + var2 - 2.0 * cov12;
  return v < 0.0 && v > -1e-12 ? 0.0 : v;
}

double ConfidenceConfig::z() const { return critical_value(conf); }

void ConfidenceConfig::validate() const {
  if (!(conf > 0.0 && conf < 1.0)) {
    throw Error(ErrorCode::Domain, "confidence level must lie in (0,1)");
  }
  if (bootstrap_resamples < 100) {
    throw Error(ErrorCode::Domain, "bootstrap resamples must be at least 100");
  }
  if (posterior_draws < 1000) {
    throw Error(ErrorCode::Domain, "posterior draws must be at least 1000");
  }
  for (const BetaPrior* prior : {&priors.se1, &priors.sp1, &priors.se2, &priors.sp2, &priors.p}) {
    if (!(prior->alpha > 0.0) || !(prior->beta > 0.0)) {
      throw Error(ErrorCode::Domain, "beta prior parameters must be positive");
    }
  }
}

const char* to_string(IntervalTarget target) {
  switch (target) {
    case IntervalTarget::Difference: return "difference";
    case IntervalTarget::Ratio: return "ratio";
    case IntervalTarget::InverseRatio: return "inverse-ratio";
  }
  return "?";
}

const char* to_string(IntervalMethod method) {
  switch (method) {
    case IntervalMethod::Wald: return "wald";
    case IntervalMethod::Logarithmic: return "logarithmic";
    case IntervalMethod::Fieller: return "fieller";
    case IntervalMethod::BootstrapBC: return "bootstrap-bc";
    case IntervalMethod::BayesianQuantile: return "bayesian-quantile";
  }
  return "?";
}

KappaCovariance kappa_covariance(const AccuracyEstimates& acc, const KappaPair& kp, double n) {
  const double p = acc.p;
  const double q = acc.q();
  const double c = kp.c;
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::Domain, "kappa_covariance: prevalence must lie in (0,1)");
  }
  if (!(n > 0.0)) throw Error(ErrorCode::Domain, "kappa_covariance: n must be positive");
  for (int h = 1; h <= 2; ++h) {
    if (!(acc.youden(h) > kYoudenTolerance)) {
      throw Error(ErrorCode::DegenerateVariance,
                  fmt::format("degenerate variance: Youden index of test {} is {:.3g}", h,
                              acc.youden(h)));
    }
  }

  KappaCovariance out;
  const std::array<double, 2> kappa = {kp.kappa1, kp.kappa2};
  for (int h = 0; h < 2; ++h) {
    const int test = h + 1;
    const double k = kappa[h];
    const double y = acc.youden(test);
    const double a1 = p * q - p * (q - c) * k;
    const double a2 = a1 + (q - c) * k;
    const double a3 = (1.0 - 2.0 * p) * y - ((1.0 - c - 2.0 * p) * y + acc.sp(test) + c - 1.0) * k;
    out.a[h] = {a1, a2, a3};
  }

  const double var_se[2] = {acc.se1 * (1.0 - acc.se1) / (n * p), acc.se2 * (1.0 - acc.se2) / (n * p)};
  const double var_sp[2] = {acc.sp1 * (1.0 - acc.sp1) / (n * q), acc.sp2 * (1.0 - acc.sp2) / (n * q)};
  const double var_p = p * q / n;

  double var[2];
  for (int h = 0; h < 2; ++h) {
    const double scale = kappa[h] / (p * q * acc.youden(h + 1));
    var[h] = scale * scale *
             (out.a[h][0] * out.a[h][0] * var_se[h] + out.a[h][1] * out.a[h][1] * var_sp[h] +
              out.a[h][2] * out.a[h][2] * var_p);
  }
  out.var1 = var[0];
  out.var2 = var[1];
  out.cov12 = kappa[0] * kappa[1] / (p * p * q * q * acc.youden(1) * acc.youden(2)) *
              (out.a[0][0] * out.a[1][0] * acc.eps1 / (n * p) +
               out.a[0][1] * out.a[1][1] * acc.eps0 / (n * q) +
               out.a[0][2] * out.a[1][2] * var_p);

  const double k1 = kp.kappa1, k2 = kp.kappa2;
  if (k2 != 0.0) {
    out.var_theta = (k2 * k2 * out.var1 + k1 * k1 * out.var2 - 2.0 * k1 * k2 * out.cov12) /
                    (k2 * k2 * k2 * k2);
  }
  if (k1 != 0.0 && k2 != 0.0) {
    out.var_log_theta =
        out.var1 / (k1 * k1) + out.var2 / (k2 * k2) - 2.0 * out.cov12 / (k1 * k2);
  }
  return out;
}

FiellerCoefficients fieller_coefficients(const KappaPair& kp, const KappaCovariance& cov,
                                         double z) {
  const double z2 = z * z;
  return {kp.kappa1 * kp.kappa1 - cov.var1 * z2, kp.kappa1 * kp.kappa2 - cov.cov12 * z2,
          kp.kappa2 * kp.kappa2 - cov.var2 * z2};
}

namespace {

struct Prepared {
  PairedCounts counts;
  bool corrected = false;
  AccuracyEstimates acc;
  KappaPair kp;
  KappaCovariance cov;
  double z = 0;
};

PairedCounts maybe_correct(const PairedCounts& counts, const ConfidenceConfig& config) {
  return config.continuity_correction ? apply_continuity_correction(counts) : counts;
}

Prepared prepare(const PairedCounts& counts, double c, const ConfidenceConfig& config) {
  config.validate();
  Prepared out;
  out.counts = maybe_correct(counts, config);
  out.corrected = config.continuity_correction;
  out.acc = accuracy_from_counts(out.counts);
  out.kp = kappa_pair(out.acc, c);
  out.cov = kappa_covariance(out.acc, out.kp, out.counts.n());
  out.z = config.z();
  return out;
}

ConfidenceInterval make_interval(IntervalTarget target, IntervalMethod method, double lower,
                                 double upper, double point, bool corrected) {
  ConfidenceInterval ci;
  ci.target = target;
  ci.method = method;
  ci.lower = std::min(lower, upper);
  ci.upper = std::max(lower, upper);
  ci.point = point;
  ci.corrected = corrected;
  return ci;
}

double safe_sqrt(double v) { return v <= 0.0 ? 0.0 : std::sqrt(v); }

}  // namespace

TestResult bloch_test(const PairedCounts& counts, double c, const ConfidenceConfig& config) {
  const Prepared prep = prepare(counts, c, config);
  const double delta = prep.kp.delta();
  const double se = safe_sqrt(prep.cov.var_delta());
  TestResult out;
  if (se <= 1e-15) {
    if (std::fabs(delta) <= 1e-15) return {0.0, 1.0};
    throw Error(ErrorCode::DegenerateVariance,
                "Bloch test undefined: zero standard error for a nonzero difference");
  }
  out.z_stat = delta / se;
  out.p_value = std::clamp(2.0 * normal_cdf(-std::fabs(out.z_stat)), 0.0, 1.0);
  return out;
}

ConfidenceInterval wald_diff_ci(const PairedCounts& counts, double c,
                                const ConfidenceConfig& config) {
  const Prepared prep = prepare(counts, c, config);
  const double delta = prep.kp.delta();
  const double half = prep.z * safe_sqrt(prep.cov.var_delta());
  return make_interval(IntervalTarget::Difference, IntervalMethod::Wald, delta - half,
                       delta + half, delta, prep.corrected);
}

ConfidenceInterval wald_ratio_ci(const PairedCounts& counts, double c,
                                 const ConfidenceConfig& config) {
  const Prepared prep = prepare(counts, c, config);
  const double theta = prep.kp.theta();
  const double half = prep.z * safe_sqrt(*prep.cov.var_theta);
  return make_interval(IntervalTarget::Ratio, IntervalMethod::Wald, theta - half, theta + half,
                       theta, prep.corrected);
}

ConfidenceInterval log_ratio_ci(const PairedCounts& counts, double c,
                                const ConfidenceConfig& config) {
  const Prepared prep = prepare(counts, c, config);
  if (!(prep.kp.kappa1 > 0.0) || !(prep.kp.kappa2 > 0.0)) {
    throw Error(ErrorCode::LogUndefined,
                "logarithmic interval undefined: both kappa estimates must be positive");
  }
  const double theta = prep.kp.theta();
  const double spread = std::exp(prep.z * safe_sqrt(*prep.cov.var_log_theta));
  return make_interval(IntervalTarget::Ratio, IntervalMethod::Logarithmic, theta / spread,
                       theta * spread, theta, prep.corrected);
}

ConfidenceInterval fieller_ratio_ci(const PairedCounts& counts, double c,
                                    const ConfidenceConfig& config) {
  const Prepared prep = prepare(counts, c, config);
  const double theta = prep.kp.theta();
  if (prep.cov.var1 == 0.0 && prep.cov.var2 == 0.0 && prep.cov.cov12 == 0.0) {
    return make_interval(IntervalTarget::Ratio, IntervalMethod::Fieller, theta, theta, theta,
                         prep.corrected);
  }
  const FiellerCoefficients w = fieller_coefficients(prep.kp, prep.cov, prep.z);
  if (!w.bounded()) {
    throw Error(ErrorCode::FiellerInvalid,
                fmt::format("Fieller interval invalid: w12^2={:.6g}, w11*w22={:.6g}, w22={:.6g}",
                            w.w12 * w.w12, w.w11 * w.w22, w.w22));
  }
  const double root = std::sqrt(w.w12 * w.w12 - w.w11 * w.w22);
  return make_interval(IntervalTarget::Ratio, IntervalMethod::Fieller, (w.w12 - root) / w.w22,
                       (w.w12 + root) / w.w22, theta, prep.corrected);
}

ConfidenceInterval bootstrap_ci(const PairedCounts& counts, double c, IntervalTarget target,
                                const ConfidenceConfig& config, const RandomStream& stream) {
  if (target == IntervalTarget::InverseRatio) {
    throw Error(ErrorCode::Domain, "bootstrap_ci: use invert_ratio_ci for the inverse ratio");
  }
  config.validate();
  const PairedCounts corrected = maybe_correct(counts, config);
  const AccuracyEstimates acc = accuracy_from_counts(corrected);
  const KappaPair kp = kappa_pair(acc, c);
  const bool ratio = target == IntervalTarget::Ratio;
  const double point = ratio ? kp.theta() : kp.delta();

  const std::array<double, 8> observed = counts.cells();
  const double total = counts.n();
  std::array<double, 8> proportions{};
  for (std::size_t k = 0; k < 8; ++k) proportions[k] = observed[k] / total;
  const auto n = static_cast<std::int64_t>(std::llround(total));

  const std::size_t B = config.bootstrap_resamples;
  const std::size_t max_draws = 10 * B;
  std::vector<double> stats(B);
  std::size_t draws = 0;
  std::size_t redraws = 0;
  for (std::size_t i = 0; i < B; ++i) {
    RandomStream replicate = stream.substream(i);
    for (;;) {
      if (++draws > max_draws) {
        throw Error(ErrorCode::BootstrapFailed,
                    fmt::format("bootstrap failed: {} of {} draws were not estimable", redraws,
                                draws - 1));
      }
      const auto cells = sample_multinomial(proportions, n, replicate);
      std::array<double, 8> as_real{};
      for (std::size_t k = 0; k < 8; ++k) as_real[k] = static_cast<double>(cells[k]);
      PairedCounts resample = PairedCounts::from_cells(as_real);
      if (config.continuity_correction) resample = apply_continuity_correction(resample);
      if (resample.s() > 0.0 && resample.r() > 0.0) {
        try {
          const KappaPair rk = kappa_pair_from_cells(resample, c);
          if (!ratio) {
            stats[i] = rk.delta();
            break;
          }
          if (rk.kappa2 != 0.0) {
            stats[i] = rk.kappa1 / rk.kappa2;
            break;
          }
        } catch (const Error&) {
        }
      }
      ++redraws;
    }
  }

  const double mean = std::accumulate(stats.begin(), stats.end(), 0.0) / static_cast<double>(B);
  const auto below = static_cast<std::size_t>(
      std::count_if(stats.begin(), stats.end(), [point](double v) { return v < point; }));
  const std::size_t clamped = std::clamp<std::size_t>(below, 1, B - 1);
  const double z0 = normal_quantile(static_cast<double>(clamped) / static_cast<double>(B));
  const double z = config.z();
  const double alpha1 = normal_cdf(2.0 * z0 - z);
  const double alpha2 = normal_cdf(2.0 * z0 + z);
  std::sort(stats.begin(), stats.end());

  ConfidenceInterval ci = make_interval(target, IntervalMethod::BootstrapBC,
                                        empirical_quantile_sorted(stats, alpha1),
                                        empirical_quantile_sorted(stats, alpha2), point,
                                        config.continuity_correction);
  ci.replicate_mean = mean;
  ci.discarded = redraws;
  return ci;
}

ConfidenceInterval bootstrap_ci(const PairedCounts& counts, double c, IntervalTarget target,
                                const ConfidenceConfig& config) {
  return bootstrap_ci(counts, c, target, config, RandomStream(config.seed, 0));
}

ConfidenceInterval bayesian_ci(const PairedCounts& counts, double c, IntervalTarget target,
                               const ConfidenceConfig& config, RandomStream stream) {
  if (target == IntervalTarget::InverseRatio) {
    throw Error(ErrorCode::Domain, "bayesian_ci: use invert_ratio_ci for the inverse ratio");
  }
  config.validate();
  const PairedCounts x = maybe_correct(counts, config);
  const AccuracyEstimates acc = accuracy_from_counts(x);
  const KappaPair kp = kappa_pair(acc, c);
  const bool ratio = target == IntervalTarget::Ratio;
  const double point = ratio ? kp.theta() : kp.delta();

  const double s = x.s();
  const double r = x.r();
  const PriorSet& pr = config.priors;
  const BetaPrior post_se1{x.s11 + x.s10 + pr.se1.alpha, s - x.s11 - x.s10 + pr.se1.beta};
  const BetaPrior post_se2{x.s11 + x.s01 + pr.se2.alpha, s - x.s11 - x.s01 + pr.se2.beta};
  const BetaPrior post_sp1{x.r01 + x.r00 + pr.sp1.alpha, r - x.r01 - x.r00 + pr.sp1.beta};
  const BetaPrior post_sp2{x.r10 + x.r00 + pr.sp2.alpha, r - x.r10 - x.r00 + pr.sp2.beta};
  const BetaPrior post_p{s + pr.p.alpha, r + pr.p.beta};

  const std::size_t M = config.posterior_draws;
  std::vector<double> stats;
  stats.reserve(M);
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < M; ++i) {
    const double se1 = sample_beta(post_se1.alpha, post_se1.beta, stream);
    const double sp1 = sample_beta(post_sp1.alpha, post_sp1.beta, stream);
    const double se2 = sample_beta(post_se2.alpha, post_se2.beta, stream);
    const double sp2 = sample_beta(post_sp2.alpha, post_sp2.beta, stream);
    const double prev = sample_beta(post_p.alpha, post_p.beta, stream);
    const double k1 = weighted_kappa(se1, sp1, prev, c);
    const double k2 = weighted_kappa(se2, sp2, prev, c);
    if (!ratio) {
      stats.push_back(k1 - k2);
    } else if (k2 != 0.0) {
      stats.push_back(k1 / k2);
    } else {
      ++dropped;
    }
  }
  if (stats.empty()) {
    throw Error(ErrorCode::RatioUndefined, "every posterior draw had kappa2 = 0");
  }

  const double mean =
      std::accumulate(stats.begin(), stats.end(), 0.0) / static_cast<double>(stats.size());
  std::sort(stats.begin(), stats.end());
  const double alpha = 1.0 - config.conf;
  ConfidenceInterval ci = make_interval(target, IntervalMethod::BayesianQuantile,
                                        empirical_quantile_sorted(stats, alpha / 2.0),
                                        empirical_quantile_sorted(stats, 1.0 - alpha / 2.0),
                                        point, config.continuity_correction);
  ci.replicate_mean = mean;
  ci.discarded = dropped;
  return ci;
}

ConfidenceInterval bayesian_ci(const PairedCounts& counts, double c, IntervalTarget target,
                               const ConfidenceConfig& config) {
  return bayesian_ci(counts, c, target, config, RandomStream(config.seed, 1));
}

ConfidenceInterval invert_ratio_ci(const ConfidenceInterval& ci, double theta_hat) {
  if (ci.target != IntervalTarget::Ratio) {
    throw Error(ErrorCode::Domain, "invert_ratio_ci expects an interval for the ratio");
  }
  if (ci.method == IntervalMethod::Wald) {
    if (theta_hat == 0.0) {
      throw Error(ErrorCode::InversionUndefined, "cannot invert a Wald interval at theta = 0");
    }
    const double t2 = theta_hat * theta_hat;
    ConfidenceInterval out = make_interval(IntervalTarget::InverseRatio, ci.method,
                                           ci.lower / t2, ci.upper / t2, 1.0 / theta_hat,
                                           ci.corrected);
    return out;
  }
  return reciprocal_ratio_ci(ci);
}

ConfidenceInterval reciprocal_ratio_ci(const ConfidenceInterval& ci) {
  if (ci.lower <= 0.0 && ci.upper >= 0.0) {
    throw Error(ErrorCode::InversionUndefined,
                "cannot invert an interval that contains zero");
  }
  ConfidenceInterval out = make_interval(IntervalTarget::InverseRatio, ci.method,
                                         1.0 / ci.upper, 1.0 / ci.lower,
                                         ci.point != 0.0 ? 1.0 / ci.point : 0.0, ci.corrected);
  out.discarded = ci.discarded;
  if (ci.replicate_mean) out.replicate_mean = ci.replicate_mean;
  return out;
}

}  // namespace wkappa
