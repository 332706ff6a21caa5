#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>

#include "wkappa/data_model.hpp"
#include "wkappa/kappa_core.hpp"
#include "wkappa/random.hpp"

namespace wkappa {

// Delta-method (co)variances of the two weighted kappa estimators.
struct KappaCovariance {
  double var1 = 0;
  double var2 = 0;
  double cov12 = 0;
  // a[h][k] for test h = 0,1 and coefficient k = 0,1,2 (a_h1, a_h2, a_h3).
  std::array<std::array<double, 3>, 2> a{};
  // Only meaningful when kappa2 != 0 (resp. both kappas != 0).
  std::optional<double> var_theta;
  std::optional<double> var_log_theta;

  // Var(kappa1 - kappa2); tiny negative round-off is clamped to zero.
  double var_delta() const;
};

struct BetaPrior {
  double alpha = 1.0;
  double beta = 1.0;
};

struct PriorSet {
  BetaPrior se1, sp1, se2, sp2, p;
};

struct ConfidenceConfig {
  double conf = 0.95;
  std::size_t bootstrap_resamples = 2000;
  std::size_t posterior_draws = 10000;
  PriorSet priors;
  std::uint64_t seed = 20190611;
  // Add 0.5 to every cell before estimating.
  bool continuity_correction = false;

  double z() const;
  // Throws ErrorCode::Domain when a field is out of range.
  void validate() const;
};

enum class IntervalTarget { Difference, Ratio, InverseRatio };

enum class IntervalMethod { Wald, Logarithmic, Fieller, BootstrapBC, BayesianQuantile };

const char* to_string(IntervalTarget target);
const char* to_string(IntervalMethod method);

struct ConfidenceInterval {
  IntervalTarget target = IntervalTarget::Difference;
  IntervalMethod method = IntervalMethod::Wald;
  double lower = 0;
  double upper = 0;
  // Maximum-likelihood point estimate. The bias-corrected bootstrap interval
  // need not contain it.
  double point = 0;
  bool corrected = false;
  // Bootstrap replicate mean or posterior mean.
  std::optional<double> replicate_mean;
  // Bootstrap redraws of non-estimable resamples, or posterior draws dropped
  // from a ratio because kappa2 was exactly zero.
  std::size_t discarded = 0;

  double length() const { return upper - lower; }
  double half_width() const { return 0.5 * (upper - lower); }
  bool contains(double value) const { return lower <= value && value <= upper; }
};

struct FiellerCoefficients {
  double w11 = 0, w12 = 0, w22 = 0;

  bool valid() const { return w12 * w12 > w11 * w22 && w22 != 0.0; }
  // With w22 < 0 the confidence set is the outside of the two roots, which
  // excludes the point estimate; only w22 > 0 yields a finite interval.
  bool bounded() const { return valid() && w22 > 0.0; }
};

struct TestResult {
  double z_stat = 0;
  double p_value = 1;
};

KappaCovariance kappa_covariance(const AccuracyEstimates& acc, const KappaPair& kp,
                                 double n);

FiellerCoefficients fieller_coefficients(const KappaPair& kp, const KappaCovariance& cov,
                                         double z);

TestResult bloch_test(const PairedCounts& counts, double c, const ConfidenceConfig& config);

ConfidenceInterval wald_diff_ci(const PairedCounts& counts, double c,
                                const ConfidenceConfig& config);
ConfidenceInterval wald_ratio_ci(const PairedCounts& counts, double c,
                                 const ConfidenceConfig& config);
ConfidenceInterval log_ratio_ci(const PairedCounts& counts, double c,
                                const ConfidenceConfig& config);
ConfidenceInterval fieller_ratio_ci(const PairedCounts& counts, double c,
                                    const ConfidenceConfig& config);

// Bias-corrected bootstrap. Resampling draws the 8-cell table from a
// multinomial with the observed proportions; replicate i uses
// stream.substream(i), so results do not depend on evaluation order.
ConfidenceInterval bootstrap_ci(const PairedCounts& counts, double c, IntervalTarget target,
                                const ConfidenceConfig& config, const RandomStream& stream);
// Uses RandomStream(config.seed, 0).
ConfidenceInterval bootstrap_ci(const PairedCounts& counts, double c, IntervalTarget target,
                                const ConfidenceConfig& config);

// Quantile interval from Monte Carlo draws of the five beta posteriors.
ConfidenceInterval bayesian_ci(const PairedCounts& counts, double c, IntervalTarget target,
                               const ConfidenceConfig& config, RandomStream stream);
ConfidenceInterval bayesian_ci(const PairedCounts& counts, double c, IntervalTarget target,
                               const ConfidenceConfig& config);

// Interval for kappa2/kappa1 from one for kappa1/kappa2: Wald bounds are
// divided by theta_hat^2, every other method takes reciprocals.
ConfidenceInterval invert_ratio_ci(const ConfidenceInterval& ci, double theta_hat);

// Plain reciprocal bounds (1/U, 1/L) regardless of method.
ConfidenceInterval reciprocal_ratio_ci(const ConfidenceInterval& ci);

}  // namespace wkappa
