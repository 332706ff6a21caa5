#pragma once

#include <array>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "wkappa/data_model.hpp"

namespace wkappa {

// Youden indices at or below this are treated as degenerate.
inline constexpr double kYoudenTolerance = 1e-10;

// Accuracy of the two tests plus prevalence and conditional dependence.
// Derived quantities are member functions so they never drift from the
// stored parameters.
struct AccuracyEstimates {
  double se1 = 0, sp1 = 0, se2 = 0, sp2 = 0;
  double p = 0;
  double eps1 = 0, eps0 = 0;

  double q() const { return 1.0 - p; }
  // test is 1 or 2
  double se(int test) const { return test == 1 ? se1 : se2; }
  double sp(int test) const { return test == 1 ? sp1 : sp2; }
  double positive_rate(int test) const { return p * se(test) + q() * (1.0 - sp(test)); }
  double youden(int test) const { return se(test) + sp(test) - 1.0; }

  // Ratio of sensitivities Se1/Se2 and of false-positive fractions.
  double rtpf() const { return se1 / se2; }
  double rfpf() const { return (1.0 - sp1) / (1.0 - sp2); }

  // Upper limits of eps1, eps0 for these accuracies.
  double eps1_bound() const;
  double eps0_bound() const;
  // Sample estimates may fall outside [0, bound]; flagged, not rejected.
  bool eps1_in_bounds() const;
  bool eps0_in_bounds() const;
};

struct KappaPair {
  double c = 0;
  double kappa1 = 0;
  double kappa2 = 0;

  double delta() const { return kappa1 - kappa2; }
  // Throws ErrorCode::RatioUndefined when kappa2 == 0.
  double theta() const;
};

// Maximum-likelihood accuracy estimates. Throws NonEstimable when s or r is 0.
AccuracyEstimates accuracy_from_counts(const PairedCounts& counts);

// kappa(c) = pqY / [p(1-Q)c + qQ(1-c)].
double weighted_kappa(double se, double sp, double p, double c);

// Inverts kappa(0), kappa(1) at prevalence p back to (Se, Sp). Throws
// InfeasibleScenario when the implied Youden index is not positive.
std::pair<double, double> accuracy_from_kappa_pair(double kappa0, double kappa1, double p);

KappaPair kappa_pair(const AccuracyEstimates& acc, double c);

// Weighted kappas straight from the eight cells (counts or probabilities).
// Agrees with kappa_pair(accuracy_from_counts(...)) algebraically.
KappaPair kappa_pair_from_cells(const PairedCounts& cells, double c);

// Crossover index c' = q*D1 / (D1 - p*D2); nullopt when the denominator
// vanishes (|D1 - p*D2| <= 1e-12).
std::optional<double> crossover_index(const AccuracyEstimates& acc);

enum class Ordering { FirstGreater, SecondGreater, Equal };

enum class ComparisonRule {
  // rTPF/rFPF on opposite sides of 1: one test dominates on [0,1].
  A,
  // Both ratios > 1 with interior crossover (b.1-b.3).
  BCrossing,
  // Both ratios > 1, no interior crossover, rTPF > rFPF (b.4).
  BSensitivityDominates,
  // Both ratios > 1, no interior crossover, rFPF > rTPF (b.5).
  BFalsePositiveDominates,
  // Both ratios < 1 with interior crossover (c.1-c.3).
  CCrossing,
  // Both ratios < 1, test 2 dominates on [0,1] (c.4).
  CSensitivityDominates,
  // Both ratios < 1, test 1 dominates on [0,1] (c.5).
  CFalsePositiveDominates,
  EqualEverywhere,
};

const char* to_string(ComparisonRule rule);
const char* to_string(Ordering ordering);

// Result of comparing kappa1(c) and kappa2(c) over c in [0,1]. The sign of
// kappa1 - kappa2 is the sign of nu(c) = q*D1 - c*(D1 - p*D2), affine in c.
struct ComparisonVerdict {
  ComparisonRule rule = ComparisonRule::EqualEverywhere;
  std::optional<double> c_prime;
  // c' within 1e-10 of 0 or 1.
  bool boundary = false;
  double q = 0, delta1 = 0, delta2 = 0, p = 0;

  double nu(double c) const { return q * delta1 - c * (delta1 - p * delta2); }
  Ordering ordering_at(double c) const;
};

// Requires both Youden indices > kYoudenTolerance (throws DegenerateVariance).
ComparisonVerdict compare_over_range(const AccuracyEstimates& acc);

struct CurvePoint {
  double c;
  double kappa1;
  double kappa2;
};

std::vector<CurvePoint> kappa_curve(const AccuracyEstimates& acc,
                                    std::span<const double> c_grid);

// Writes header `c,kappa1,kappa2` followed by rows at 17 significant digits.
void write_curve_csv(std::ostream& out, std::span<const CurvePoint> curve);

}  // namespace wkappa
