#include "wkappa/kappa_core.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "wkappa/error.hpp"

namespace wkappa {

double AccuracyEstimates::eps1_bound() const {
  return std::min(se1 * (1.0 - se2), se2 * (1.0 - se1));
}

double AccuracyEstimates::eps0_bound() const {
  return std::min(sp1 * (1.0 - sp2), sp2 * (1.0 - sp1));
}

bool AccuracyEstimates::eps1_in_bounds() const {
  return eps1 >= -1e-12 && eps1 <= eps1_bound() + 1e-12;
}

bool AccuracyEstimates::eps0_in_bounds() const {
  return eps0 >= -1e-12 && eps0 <= eps0_bound() + 1e-12;
}

double KappaPair::theta() const {
  if (kappa2 == 0.0) {
    throw Error(ErrorCode::RatioUndefined, "ratio undefined: kappa2(c) is zero");
  }
  return kappa1 / kappa2;
}

AccuracyEstimates accuracy_from_counts(const PairedCounts& counts) {
  const double s = counts.s();
  const double r = counts.r();
  if (!(s > 0.0) || !(r > 0.0)) {
    throw Error(ErrorCode::NonEstimable,
                s > 0.0 ? "r = 0: no non-diseased subjects, kappa not estimable"
                        : "s = 0: no diseased subjects, kappa not estimable");
  }
  AccuracyEstimates acc;
  acc.se1 = (counts.s11 + counts.s10) / s;
  acc.se2 = (counts.s11 + counts.s01) / s;
  acc.sp1 = (counts.r01 + counts.r00) / r;
  acc.sp2 = (counts.r10 + counts.r00) / r;
  acc.p = s / counts.n();
  acc.eps1 = (counts.s11 * counts.s00 - counts.s10 * counts.s01) / (s * s);
  acc.eps0 = (counts.r11 * counts.r00 - counts.r10 * counts.r01) / (r * r);
  return acc;
}

double weighted_kappa(double se, double sp, double p, double c) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::Domain, "weighted_kappa: prevalence must lie in (0,1)");
  }
  if (!(c >= 0.0 && c <= 1.0)) {
    throw Error(ErrorCode::Domain, "weighted_kappa: weighting index must lie in [0,1]");
  }
  if (!(se >= 0.0 && se <= 1.0) || !(sp >= 0.0 && sp <= 1.0)) {
    throw Error(ErrorCode::Domain, "weighted_kappa: Se and Sp must lie in [0,1]");
  }
  const double q = 1.0 - p;
  const double positive = p * se + q * (1.0 - sp);
  const double denominator = p * (1.0 - positive) * c + q * positive * (1.0 - c);
  if (!(denominator > 0.0)) {
    throw Error(ErrorCode::UndefinedKappa,
                "weighted kappa undefined: zero denominator (degenerate positive rate)");
  }
  return p * q * (se + sp - 1.0) / denominator;
}

std::pair<double, double> accuracy_from_kappa_pair(double kappa0, double kappa1, double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::Domain, "prevalence must lie in (0,1)");
  }
  if (!(kappa0 > 0.0 && kappa0 <= 1.0) || !(kappa1 > 0.0 && kappa1 <= 1.0)) {
    throw Error(ErrorCode::Domain, "kappa(0) and kappa(1) must lie in (0,1]");
  }
  const double q = 1.0 - p;
  const double denominator = q * kappa0 + p * kappa1;
  const double se = (q * kappa0 + p) * kappa1 / denominator;
  const double sp = (p * kappa1 + q) * kappa0 / denominator;
  if (!(se + sp - 1.0 > kYoudenTolerance)) {
    throw Error(ErrorCode::InfeasibleScenario,
                fmt::format("scenario infeasible: Youden index {:.3g} is not positive",
                            se + sp - 1.0));
  }
  return {se, sp};
}

KappaPair kappa_pair(const AccuracyEstimates& acc, double c) {
  return {c, weighted_kappa(acc.se1, acc.sp1, acc.p, c),
          weighted_kappa(acc.se2, acc.sp2, acc.p, c)};
}

KappaPair kappa_pair_from_cells(const PairedCounts& x, double c) {
  if (!(c >= 0.0 && c <= 1.0)) {
    throw Error(ErrorCode::Domain, "weighting index must lie in [0,1]");
  }
  const double s = x.s();
  const double r = x.r();
  if (!(s > 0.0) || !(r > 0.0)) {
    throw Error(ErrorCode::NonEstimable, "kappa not estimable: s or r is zero");
  }
  const double num1 = (x.s11 + x.s10) * (x.r01 + x.r00) - (x.s01 + x.s00) * (x.r10 + x.r11);
  const double den1 = s * c * (x.s01 + x.s00 + x.r01 + x.r00) +
                      r * (1.0 - c) * (x.s11 + x.s10 + x.r11 + x.r10);
  const double num2 = (x.s11 + x.s01) * (x.r10 + x.r00) - (x.s10 + x.s00) * (x.r01 + x.r11);
  const double den2 = s * c * (x.s10 + x.s00 + x.r10 + x.r00) +
                      r * (1.0 - c) * (x.s11 + x.s01 + x.r11 + x.r01);
  if (!(den1 > 0.0) || !(den2 > 0.0)) {
    throw Error(ErrorCode::UndefinedKappa, "weighted kappa undefined: zero denominator");
  }
  return {c, num1 / den1, num2 / den2};
}

namespace {

struct Deltas {
  double delta1;
  double delta2;
};

Deltas deltas(const AccuracyEstimates& acc) {
  return {acc.se1 * (1.0 - acc.sp2) - acc.se2 * (1.0 - acc.sp1),
          acc.youden(1) - acc.youden(2)};
}

}  // namespace

std::optional<double> crossover_index(const AccuracyEstimates& acc) {
  const auto [d1, d2] = deltas(acc);
  const double denominator = d1 - acc.p * d2;
  if (std::fabs(denominator) <= 1e-12) return std::nullopt;
  return acc.q() * d1 / denominator;
}

const char* to_string(ComparisonRule rule) {
  switch (rule) {
    case ComparisonRule::A: return "a";
    case ComparisonRule::BCrossing: return "b.1-b.3";
    case ComparisonRule::BSensitivityDominates: return "b.4";
    case ComparisonRule::BFalsePositiveDominates: return "b.5";
    case ComparisonRule::CCrossing: return "c.1-c.3";
    case ComparisonRule::CSensitivityDominates: return "c.4";
    case ComparisonRule::CFalsePositiveDominates: return "c.5";
    case ComparisonRule::EqualEverywhere: return "equal-everywhere";
  }
  return "?";
}

const char* to_string(Ordering ordering) {
  switch (ordering) {
    case Ordering::FirstGreater: return "kappa1>kappa2";
    case Ordering::SecondGreater: return "kappa1<kappa2";
    case Ordering::Equal: return "kappa1=kappa2";
  }
  return "?";
}

Ordering ComparisonVerdict::ordering_at(double c) const {
  if (rule == ComparisonRule::EqualEverywhere) return Ordering::Equal;
  if (c_prime && std::fabs(c - *c_prime) <= 1e-12) return Ordering::Equal;
  const double v = nu(c);
  if (std::fabs(v) <= 1e-15) return Ordering::Equal;
  return v > 0.0 ? Ordering::FirstGreater : Ordering::SecondGreater;
}

ComparisonVerdict compare_over_range(const AccuracyEstimates& acc) {
  if (!(acc.youden(1) > kYoudenTolerance) || !(acc.youden(2) > kYoudenTolerance)) {
    throw Error(ErrorCode::DegenerateVariance,
                "comparison requires both Youden indices to be positive");
  }
  const auto [d1, d2] = deltas(acc);
  ComparisonVerdict verdict;
  verdict.q = acc.q();
  verdict.p = acc.p;
  verdict.delta1 = d1;
  verdict.delta2 = d2;
  verdict.c_prime = crossover_index(acc);
  if (verdict.c_prime) {
    const double cp = *verdict.c_prime;
    verdict.boundary = std::fabs(cp) < 1e-10 || std::fabs(cp - 1.0) < 1e-10;
  }

  constexpr double tol = 1e-12;
  const double rtpf = acc.rtpf();
  const double rfpf = acc.rfpf();
  const bool tpf_eq = std::fabs(rtpf - 1.0) <= tol;
  const bool fpf_eq = std::fabs(rfpf - 1.0) <= tol;
  const bool tpf_gt = rtpf > 1.0 + tol, tpf_lt = rtpf < 1.0 - tol;
  const bool fpf_gt = rfpf > 1.0 + tol, fpf_lt = rfpf < 1.0 - tol;

  if (tpf_eq && fpf_eq) {
    verdict.rule = ComparisonRule::EqualEverywhere;
    return verdict;
  }
  if (!(tpf_gt && fpf_gt) && !(tpf_lt && fpf_lt)) {
    verdict.rule = ComparisonRule::A;
    return verdict;
  }

  const bool interior = verdict.c_prime && *verdict.c_prime > 1e-10 &&
                        *verdict.c_prime < 1.0 - 1e-10;
  const bool first_wins = verdict.nu(0.5) > 0.0;
  if (tpf_gt) {
    verdict.rule = interior     ? ComparisonRule::BCrossing
                   : first_wins ? ComparisonRule::BSensitivityDominates
                                : ComparisonRule::BFalsePositiveDominates;
  } else {
    verdict.rule = interior     ? ComparisonRule::CCrossing
                   : first_wins ? ComparisonRule::CFalsePositiveDominates
                                : ComparisonRule::CSensitivityDominates;
  }
  return verdict;
}

std::vector<CurvePoint> kappa_curve(const AccuracyEstimates& acc,
                                    std::span<const double> c_grid) {
  std::vector<CurvePoint> rows;
  rows.reserve(c_grid.size());
  for (double c : c_grid) {
    const KappaPair kp = kappa_pair(acc, c);
    rows.push_back({c, kp.kappa1, kp.kappa2});
  }
  return rows;
}

void write_curve_csv(std::ostream& out, std::span<const CurvePoint> curve) {
  out << "c,kappa1,kappa2\n";
  for (const auto& row : curve) {
    fmt::print(out, "{:.17g},{:.17g},{:.17g}\n", row.c, row.kappa1, row.kappa2);
  }
}

}  // namespace wkappa
