#include "wkappa/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "wkappa/error.hpp"

namespace wkappa {

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

namespace {

// Rational approximation (Acklam) with relative error ~1.15e-9; refined below.
double quantile_initial_guess(double q) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (q < p_low) {
    const double t = std::sqrt(-2.0 * std::log(q));
    return (((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]) /
           ((((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0);
  }
  if (q > 1.0 - p_low) {
    const double t = std::sqrt(-2.0 * std::log1p(-q));
    return -(((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]) /
           ((((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0);
  }
  const double u = q - 0.5;
  const double r = u * u;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * u /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_quantile(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw Error(ErrorCode::Domain,
                "normal_quantile: probability must lie in (0,1), got " + std::to_string(q));
  }
  if (q == 0.5) return 0.0;
  double x = quantile_initial_guess(q);
  // Halley refinement on Phi(x) - q; the upper half uses the complement so the
  // residual keeps full relative precision in both tails.
  for (int iter = 0; iter < 2; ++iter) {
    const double residual =
        (q < 0.5) ? normal_cdf(x) - q : (1.0 - q) - normal_cdf(-x);
    const double density = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    if (density == 0.0) break;
    const double u = residual / density;
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

double critical_value(double conf) {
  if (!(conf > 0.0 && conf < 1.0)) {
    throw Error(ErrorCode::Domain, "confidence level must lie in (0,1)");
  }
  return normal_quantile(1.0 - (1.0 - conf) / 2.0);
}

double empirical_quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) {
    throw Error(ErrorCode::Domain, "empirical_quantile: empty sequence");
  }
  if (!(q >= 0.0 && q <= 1.0)) {
    throw Error(ErrorCode::Domain, "empirical_quantile: level must lie in [0,1]");
  }
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double empirical_quantile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  return empirical_quantile_sorted(values, q);
}

}  // namespace wkappa
