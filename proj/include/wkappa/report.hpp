#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wkappa/data_model.hpp"
#include "wkappa/inference.hpp"
#include "wkappa/kappa_core.hpp"
#include "wkappa/sample_size.hpp"
#include "wkappa/simulation.hpp"

namespace wkappa {

struct AnalysisOptions {
  // Empty: 0.1, ..., 0.9 plus the crossover index when interior.
  std::vector<double> c_values;
  ConfidenceConfig config;
  // 0 disables the sample-size plan.
  double precision = 0;
  // Empty: every standard method.
  std::vector<std::string> methods;
  // Add 0.5 to every cell when the recommendation asks for it (n < 100).
  bool auto_correct = true;
};

struct IntervalEntry {
  std::string method;
  std::optional<ConfidenceInterval> ci;
  std::string error;
};

struct ReportRow {
  KappaPair kp;
  std::optional<double> theta;
  std::vector<IntervalEntry> intervals;
  std::optional<TestResult> bloch;
  std::string bloch_error;
  // Wald interval for kappa2/kappa1: bounds over theta^2, and plain reciprocals.
  std::optional<ConfidenceInterval> inverse_wald;
  std::optional<ConfidenceInterval> reciprocal_wald;
  std::optional<SampleSizePlan> plan;
  std::string plan_error;
};

struct AnalysisReport {
  PairedCounts counts;
  PairedCounts analysed;
  bool corrected = false;
  ConfidenceConfig config;
  double precision = 0;
  CountsValidation validation;
  AccuracyEstimates accuracy;
  std::optional<ComparisonVerdict> verdict;
  std::optional<double> c_prime;
  std::vector<ReportRow> rows;
  Recommendation recommendation;
  std::vector<std::string> warnings;
};

// Throws NonEstimable naming the empty stratum when s or r is zero.
AnalysisReport build_report(const PairedCounts& counts, const AnalysisOptions& options);

// Both renderings read the same report value; only the human one rounds.
std::string render_human(const AnalysisReport& report);
std::string render_machine(const AnalysisReport& report);

}  // namespace wkappa
