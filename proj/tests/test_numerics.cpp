#include <doctest.h>

#include <cmath>
#include <vector>

#include "wkappa/error.hpp"
#include "wkappa/numerics.hpp"

using namespace wkappa;

namespace {

// Maclaurin series of erf, summed in long double. Independent of the library.
long double erf_series(long double x) {
  long double term = x, sum = x;
  for (int n = 1; n < 200; ++n) {
    term *= -x * x / n;
    sum += term / (2 * n + 1);
  }
  return 2.0L / std::sqrt(3.14159265358979323846264338327950288L) * sum;
}

long double phi_oracle(long double x) { return 0.5L * (1.0L + erf_series(x / std::sqrt(2.0L))); }

double quantile_oracle(double q) {
  long double lo = -6, hi = 6;
  for (int i = 0; i < 200; ++i) {
    const long double mid = 0.5L * (lo + hi);
    (phi_oracle(mid) < q ? lo : hi) = mid;
  }
  return static_cast<double>(0.5L * (lo + hi));
}

}  // namespace

TEST_CASE("normal quantile examples") {
  CHECK(normal_quantile(0.5) == 0.0);
  const double z = normal_quantile(0.975);
  CHECK(std::round(z * 1e6) / 1e6 == doctest::Approx(1.959964).epsilon(1e-12));
  CHECK(z == doctest::Approx(quantile_oracle(0.975)).epsilon(1e-13));
  CHECK(critical_value(0.95) == doctest::Approx(z).epsilon(1e-15));
}

TEST_CASE("normal cdf agrees with the series oracle") {
  for (double x = -5.0; x <= 5.0; x += 0.125) {
    CHECK(std::fabs(normal_cdf(x) - static_cast<double>(phi_oracle(x))) < 1e-12);
    CHECK(normal_cdf(-x) + normal_cdf(x) == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("quantile inverts the cdf and is increasing") {
  double prev = -INFINITY;
  for (int i = 1; i < 10000; ++i) {
    const double q = i / 10000.0;
    const double x = normal_quantile(q);
    CHECK(std::fabs(normal_cdf(x) - q) < 1e-12);
    CHECK(x > prev);
    prev = x;
  }
  for (double q : {1e-10, 1e-6, 0.001, 0.999, 1 - 1e-6}) {
    CHECK(std::fabs(normal_cdf(normal_quantile(q)) - q) < 1e-12);
  }
}

TEST_CASE("quantile domain errors") {
  for (double q : {0.0, 1.0, -0.1, 1.5, std::nan("")}) {
    CHECK_THROWS_AS(normal_quantile(q), Error);
  }
  CHECK_THROWS_AS(critical_value(1.0), Error);
}

TEST_CASE("empirical quantile") {
  const std::vector<double> v{5, 1, 4, 2, 3};
  CHECK(empirical_quantile(v, 0.5) == 3.0);
  CHECK(empirical_quantile(v, 0.0) == 1.0);
  CHECK(empirical_quantile(v, 1.0) == 5.0);
  CHECK(empirical_quantile({10, 20}, 0.25) == doctest::Approx(12.5));
  CHECK(empirical_quantile({7}, 0.3) == 7.0);
  CHECK_THROWS_AS(empirical_quantile({}, 0.5), Error);
  CHECK_THROWS_AS(empirical_quantile({1, 2}, 1.5), Error);
}
