#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wkappa/data_model.hpp"
#include "wkappa/inference.hpp"
#include "wkappa/kappa_core.hpp"

namespace wkappa {

// Pilots below this size are continuity-corrected before planning.
inline constexpr double kSmallPilot = 100.0;

struct SampleSizePlan {
  double phi = 0;
  double conf = 0.95;
  std::int64_t n_required = 0;
  bool achieved = false;
  std::int64_t pilot_n = 0;
  int iterations = 1;

  // Unrounded sample size; zero when the precision was already reached.
  double n_exact = 0;
  bool corrected = false;
  double theta_hat = 0;
  ConfidenceInterval wald;
  std::vector<std::string> warnings;

  std::int64_t additional() const { return n_required - pilot_n; }
};

// Unrounded n that makes the Wald ratio half-width equal phi.
double sample_size_exact(const AccuracyEstimates& acc, const KappaPair& kp, double c,
                         double phi, double conf);

// Ceiling of sample_size_exact, at least 1.
std::int64_t required_sample_size(const AccuracyEstimates& acc, const KappaPair& kp, double c,
                                  double phi, double conf);

bool precision_reached(const ConfidenceInterval& ci, double phi);

// Precision on kappa1/kappa2 equivalent to precision phi_prime on its inverse.
double precision_for_inverse(double theta_hat, double phi_prime);

// One planning round from the current sample. `round` numbers the call in the
// user's iteration sequence.
SampleSizePlan plan_iteration(const PairedCounts& counts, double c, double phi, double conf,
                              const ConfidenceConfig& config, int round = 1);

}  // namespace wkappa
