#pragma once

#include <span>
#include <vector>

namespace wkappa {

// Standard normal distribution function. Absolute error below 1e-15.
double normal_cdf(double x);

// Inverse of normal_cdf on (0,1); throws ErrorCode::Domain otherwise.
double normal_quantile(double q);

// Two-sided critical value z_{1-alpha/2} for confidence level `conf`.
double critical_value(double conf);

// Interpolating empirical quantile: linear interpolation between order
// statistics at one-based position q*(m-1)+1. `sorted` must be ascending.
double empirical_quantile_sorted(std::span<const double> sorted, double q);

// Same as above but sorts a copy of `values` first.
double empirical_quantile(std::vector<double> values, double q);

}  // namespace wkappa
