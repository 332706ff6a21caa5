#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wkappa/data_model.hpp"
#include "wkappa/inference.hpp"
#include "wkappa/random.hpp"

namespace wkappa {

// True parameters of a simulated population and its cell probabilities in the
// order (p11, p10, p01, p00, q11, q10, q01, q00).
struct Scenario {
  double se1 = 0, sp1 = 0, se2 = 0, sp2 = 0;
  double p = 0;
  double eps1 = 0, eps0 = 0;
  std::array<double, 8> pi{};
  double c = 0.5;
  double kappa1 = 0, kappa2 = 0;

  double delta() const { return kappa1 - kappa2; }
  // Throws RatioUndefined when kappa2 == 0.
  double theta() const;
  double true_value(IntervalTarget target) const;
  AccuracyEstimates accuracy() const;
};

// Largest admissible eps1 and eps0.
std::pair<double, double> dependence_bounds(double se1, double se2, double sp1, double sp2);

Scenario scenario_probabilities(double se1, double sp1, double se2, double sp2, double p,
                                double eps1, double eps0, double c);

// Accuracies from kappa(0), kappa(1) of each test; eps at fraction f of its bound.
Scenario build_scenario_from_kappas(double k0_1, double k1_1, double k0_2, double k1_2,
                                    double p, double c, double f);

PairedCounts sample_counts(const Scenario& scenario, std::int64_t n, RandomStream& stream);

// An interval construction evaluated inside a coverage study. `stream` is
// private to the (replicate, method) pair.
struct CoverageMethod {
  std::string name;
  IntervalTarget target = IntervalTarget::Difference;
  std::function<ConfidenceInterval(const PairedCounts&, double c, const ConfidenceConfig&,
                                   RandomStream& stream)>
      compute;
};

// Names: wald-diff, boot-diff, bayes-diff, wald-ratio, log-ratio,
// fieller-ratio, boot-ratio, bayes-ratio. Throws Usage on anything else.
CoverageMethod standard_method(const std::string& name);
std::vector<std::string> standard_method_names();

struct StudyOptions {
  std::size_t replicates = 10000;
  unsigned jobs = 1;
  std::uint64_t seed = 20190611;
  // Keys the study's streams; distinct scenarios in a batch use distinct ids.
  std::uint64_t stream_id = 0;
};

struct CoverageResult {
  std::string method;
  IntervalTarget target = IntervalTarget::Difference;
  std::int64_t n = 0;
  std::size_t N = 0;
  // Invalid intervals count as misses in cp and are excluded from cp_valid.
  double cp = 0;
  double cp_valid = 0;
  double al = 0;
  std::size_t invalid = 0;
  // Samples redrawn because s or r was zero; shared by all methods of a study.
  std::size_t redraws = 0;
  std::optional<bool> failed;
  double true_value = 0;
};

// Replicate k draws from RandomStream(seed, stream_id).substream(k); results
// do not depend on `jobs`.
std::vector<CoverageResult> coverage_study(const Scenario& scenario, std::int64_t n,
                                           const std::vector<CoverageMethod>& methods,
                                           const ConfidenceConfig& config,
                                           const StudyOptions& options);

// Failure rule at 95% nominal: cp <= 0.93. Other levels throw UnsupportedNominal.
bool evaluate_failure(double cp, double nominal);

struct Recommendation {
  IntervalMethod method = IntervalMethod::Wald;
  IntervalTarget target = IntervalTarget::Ratio;
  bool corrected = false;
  bool any_method = false;
  std::string text;
};

Recommendation recommend_method(std::int64_t n);

struct BatchRow {
  double k0_1 = 0, k1_1 = 0, k0_2 = 0, k1_2 = 0;
  double p = 0, c = 0, f = 0;
  std::int64_t n = 0;
  std::size_t N = 0;
};

// Header `k0_1,k1_1,k0_2,k1_2,p,c,f,n,N`. Errors carry the 1-based line.
std::vector<BatchRow> read_batch(std::istream& in);
std::vector<BatchRow> read_batch_file(const std::string& path);

// Header `method,target,n,N,cp,al,failed,redraws`.
void write_coverage_report(std::ostream& out, const std::vector<CoverageResult>& rows);
// Adds scenario index, cp_valid, invalid and the true value.
void write_coverage_detail(std::ostream& out, const std::vector<std::size_t>& scenario,
                           const std::vector<CoverageResult>& rows);

}  // namespace wkappa
