#include "wkappa/report.hpp"

#include <algorithm>
#include <cmath>
#include <string_view>

#include <fmt/format.h>

#include "wkappa/error.hpp"

namespace wkappa {

namespace {

std::vector<double> default_grid(const std::optional<double>& c_prime) {
  std::vector<double> grid;
  for (int k = 1; k <= 9; ++k) grid.push_back(k / 10.0);
  if (c_prime && *c_prime > 0.0 && *c_prime < 1.0) {
    grid.push_back(*c_prime);
    std::sort(grid.begin(), grid.end());
  }
  return grid;
}

ConfidenceInterval compute_interval(const std::string& name, const PairedCounts& counts,
                                    double c, const ConfidenceConfig& cfg) {
  const CoverageMethod method = standard_method(name);
  // Same streams as the seed-only overloads of bootstrap_ci and bayesian_ci.
  RandomStream stream(cfg.seed, name.rfind("bayes", 0) == 0 ? 1 : 0);
  return method.compute(counts, c, cfg, stream);
}

// Fixed decimals without a negative zero.
std::string fixed(double v, int decimals) {
  std::string s = fmt::format("{:.{}f}", v, decimals);
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string c_label(double c) { return fmt::format("{:.4g}", c); }

std::string full(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

AnalysisReport build_report(const PairedCounts& counts, const AnalysisOptions& options) {
  AnalysisReport rep;
  rep.counts = counts;
  rep.precision = options.precision;
  rep.validation = validate_counts(counts);
  accuracy_from_counts(counts);

  rep.recommendation = recommend_method(std::max<std::int64_t>(1, std::llround(counts.n())));
  rep.config = options.config;
  rep.corrected = options.config.continuity_correction ||
                  (options.auto_correct && rep.recommendation.corrected);
  rep.config.continuity_correction = rep.corrected;
  rep.config.validate();
  rep.analysed = rep.corrected ? apply_continuity_correction(counts) : counts;
  rep.accuracy = accuracy_from_counts(rep.analysed);

  if (!rep.validation.degenerate_margins.empty()) {
    std::string names;
    for (const auto& m : rep.validation.degenerate_margins) {
      names += (names.empty() ? "" : ", ") + m;
    }
    rep.warnings.push_back("zero column margins: " + names);
  }
  if (rep.validation.correction_required && !rep.corrected) {
    rep.warnings.push_back("two or more zero margins: the 0.5 correction is advisable");
  }
  if (rep.corrected) {
    rep.warnings.push_back(
        fmt::format("0.5 added to every cell (n = {})", std::llround(counts.n())));
  }
  if (!rep.accuracy.eps1_in_bounds()) {
    rep.warnings.push_back(fmt::format("eps1 = {} lies outside [0, {}]",
                                       fixed(rep.accuracy.eps1, 4),
                                       fixed(rep.accuracy.eps1_bound(), 4)));
  }
  if (!rep.accuracy.eps0_in_bounds()) {
    rep.warnings.push_back(fmt::format("eps0 = {} lies outside [0, {}]",
                                       fixed(rep.accuracy.eps0, 4),
                                       fixed(rep.accuracy.eps0_bound(), 4)));
  }

  try {
    rep.verdict = compare_over_range(rep.accuracy);
    rep.c_prime = rep.verdict->c_prime;
  } catch (const Error& e) {
    rep.warnings.push_back(std::string("no comparison over c: ") + e.what());
    if (rep.accuracy.youden(1) > kYoudenTolerance && rep.accuracy.youden(2) > kYoudenTolerance) {
      rep.c_prime = crossover_index(rep.accuracy);
    }
  }

  const std::vector<double> grid =
      options.c_values.empty() ? default_grid(rep.c_prime) : options.c_values;
  const std::vector<std::string> methods =
      options.methods.empty() ? standard_method_names() : options.methods;
  for (const auto& name : methods) standard_method(name);

  for (double c : grid) {
    ReportRow row;
    row.kp = kappa_pair(rep.accuracy, c);
    if (row.kp.kappa2 != 0.0) row.theta = row.kp.theta();
    for (const auto& name : methods) {
      IntervalEntry entry;
      entry.method = name;
      try {
        entry.ci = compute_interval(name, counts, c, rep.config);
      } catch (const Error& e) {
        entry.error = e.what();
        if (e.code() == ErrorCode::FiellerInvalid) {
          rep.warnings.push_back(fmt::format("Fieller interval invalid at c = {}", c_label(c)));
        }
      }
      if (name == "wald-ratio" && entry.ci) {
        try {
          row.inverse_wald = invert_ratio_ci(*entry.ci, entry.ci->point);
          row.reciprocal_wald = reciprocal_ratio_ci(*entry.ci);
        } catch (const Error&) {
        }
      }
      row.intervals.push_back(std::move(entry));
    }
    try {
      row.bloch = bloch_test(counts, c, rep.config);
    } catch (const Error& e) {
      row.bloch_error = e.what();
    }
    if (options.precision > 0.0) {
      try {
        row.plan = plan_iteration(counts, c, options.precision, rep.config.conf, rep.config);
        for (const auto& w : row.plan->warnings) {
          rep.warnings.push_back(fmt::format("c = {}: {}", c_label(c), w));
        }
      } catch (const Error& e) {
        row.plan_error = e.what();
      }
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

namespace {

std::string interval_text(const ConfidenceInterval& ci) {
  return fmt::format("({}, {})", fixed(ci.lower, 3), fixed(ci.upper, 3));
}

std::string verdict_text(const ComparisonVerdict& v) {
  if (v.rule == ComparisonRule::EqualEverywhere) return "kappa1 = kappa2 for every c";
  if (v.c_prime && v.c_prime > 0.0 && v.c_prime < 1.0 &&
      (v.rule == ComparisonRule::BCrossing || v.rule == ComparisonRule::CCrossing)) {
    const char* below = v.ordering_at(0.0) == Ordering::FirstGreater ? ">" : "<";
    const char* above = v.ordering_at(1.0) == Ordering::FirstGreater ? ">" : "<";
    const std::string cp = fixed(*v.c_prime, 4);
    return fmt::format("kappa1 {} kappa2 for c < {}, kappa1 {} kappa2 for c > {}", below, cp,
                       above, cp);
  }
  return v.ordering_at(0.5) == Ordering::FirstGreater ? "kappa1 > kappa2 for every c"
                                                      : "kappa1 < kappa2 for every c";
}

}  // namespace

std::string render_human(const AnalysisReport& r) {
  std::string out;
  auto line = [&out](const std::string& s) {
    out += s;
    out += '\n';
  };
  const PairedCounts& x = r.counts;
  line("Weighted kappa coefficients of two binary tests, paired design");
  line(fmt::format("counts: s11={} s10={} s01={} s00={} r11={} r10={} r01={} r00={}  n={}",
                   x.s11, x.s10, x.s01, x.s00, x.r11, x.r10, x.r01, x.r00, x.n()));
  line(fmt::format("confidence {}  bootstrap B={}  posterior draws M={}  seed={}", r.config.conf,
                   r.config.bootstrap_resamples, r.config.posterior_draws, r.config.seed));
  if (r.corrected) line("continuity correction: 0.5 added to every cell");
  line("");
  const AccuracyEstimates& a = r.accuracy;
  line(fmt::format("Se1 = {}  Sp1 = {}", fixed(a.se1, 4), fixed(a.sp1, 4)));
  line(fmt::format("Se2 = {}  Sp2 = {}", fixed(a.se2, 4), fixed(a.sp2, 4)));
  line(fmt::format("p = {}  eps1 = {}  eps0 = {}", fixed(a.p, 4), fixed(a.eps1, 4),
                   fixed(a.eps0, 4)));
  line(fmt::format("rTPF = {}  rFPF = {}", fixed(a.rtpf(), 3), fixed(a.rfpf(), 3)));
  if (r.c_prime) {
    line(fmt::format("crossover c' = {}", fixed(*r.c_prime, 4)));
  } else {
    line("crossover c' undefined");
  }
  if (r.verdict) {
    line(fmt::format("rule {}: {}", to_string(r.verdict->rule), verdict_text(*r.verdict)));
  }
  line("");
  line(fmt::format("{:<8}{:>9}{:>9}{:>9}{:>9}", "c", "kappa1", "kappa2", "delta", "theta"));
  for (const auto& row : r.rows) {
    line(fmt::format("{:<8}{:>9}{:>9}{:>9}{:>9}", c_label(row.kp.c), fixed(row.kp.kappa1, 3),
                     fixed(row.kp.kappa2, 3), fixed(row.kp.delta(), 3),
                     row.theta ? fixed(*row.theta, 3) : std::string("NA")));
  }
  for (const auto& row : r.rows) {
    line("");
    line(fmt::format("c = {}: intervals at confidence {}", c_label(row.kp.c), r.config.conf));
    for (const auto& e : row.intervals) {
      if (e.ci) {
        line(fmt::format("  {:<15}{}", e.method, interval_text(*e.ci)));
      } else {
        line(fmt::format("  {:<15}not available: {}", e.method, e.error));
      }
    }
    if (row.inverse_wald) {
      line(fmt::format("  inverse ratio, Wald bounds over theta squared: {}",
                       interval_text(*row.inverse_wald)));
    }
    if (row.reciprocal_wald) {
      line(fmt::format("  inverse ratio, reciprocal Wald bounds:         {}",
                       interval_text(*row.reciprocal_wald)));
    }
    if (row.bloch) {
      line(fmt::format("  Bloch test: z = {}  p-value = {}", fixed(row.bloch->z_stat, 3),
                       fixed(row.bloch->p_value, 4)));
    } else {
      line("  Bloch test not available: " + row.bloch_error);
    }
    if (row.plan) {
      const SampleSizePlan& p = *row.plan;
      if (p.achieved) {
        line(fmt::format("  precision {} reached with n = {} (half-width {})", p.phi, p.pilot_n,
                         fixed(p.wald.half_width(), 4)));
      } else {
        line(fmt::format("  precision {} (half-width {}): n = {}; add {} subjects", p.phi,
                         fixed(p.wald.half_width(), 4), p.n_required, p.additional()));
      }
    } else if (!row.plan_error.empty()) {
      line("  sample size not available: " + row.plan_error);
    }
  }
  line("");
  line("recommendation: " + r.recommendation.text);
  for (const auto& w : r.warnings) line("warning: " + w);
  return out;
}

std::string render_machine(const AnalysisReport& r) {
  std::string out;
  auto kv = [&out](std::string_view key, const std::string& value) {
    out += key;
    out += '=';
    out += value;
    out += '\n';
  };
  auto num = [&kv](std::string_view key, double v) { kv(key, full(v)); };
  const char* names[] = {"s11", "s10", "s01", "s00", "r11", "r10", "r01", "r00"};
  const auto raw = r.counts.cells();
  const auto used = r.analysed.cells();
  for (std::size_t k = 0; k < 8; ++k) num(fmt::format("counts.{}", names[k]), raw[k]);
  num("n", r.counts.n());
  kv("corrected", r.corrected ? "1" : "0");
  for (std::size_t k = 0; k < 8; ++k) num(fmt::format("analysed.{}", names[k]), used[k]);
  num("conf", r.config.conf);
  kv("bootstrap_b", std::to_string(r.config.bootstrap_resamples));
  kv("bayes_m", std::to_string(r.config.posterior_draws));
  kv("seed", std::to_string(r.config.seed));
  const std::pair<const char*, const BetaPrior*> priors[] = {
      {"se1", &r.config.priors.se1}, {"sp1", &r.config.priors.sp1},
      {"se2", &r.config.priors.se2}, {"sp2", &r.config.priors.sp2},
      {"p", &r.config.priors.p}};
  for (const auto& [name, prior] : priors) {
    num(fmt::format("prior.{}.alpha", name), prior->alpha);
    num(fmt::format("prior.{}.beta", name), prior->beta);
  }
  num("precision", r.precision);
  const AccuracyEstimates& a = r.accuracy;
  num("acc.se1", a.se1);
  num("acc.sp1", a.sp1);
  num("acc.se2", a.se2);
  num("acc.sp2", a.sp2);
  num("acc.p", a.p);
  num("acc.eps1", a.eps1);
  num("acc.eps0", a.eps0);
  num("acc.q1", a.positive_rate(1));
  num("acc.q2", a.positive_rate(2));
  num("acc.y1", a.youden(1));
  num("acc.y2", a.youden(2));
  num("rtpf", a.rtpf());
  num("rfpf", a.rfpf());
  kv("c_prime", r.c_prime ? full(*r.c_prime) : "none");
  if (r.verdict) {
    kv("rule", to_string(r.verdict->rule));
    kv("verdict", verdict_text(*r.verdict));
  }
  kv("rows", std::to_string(r.rows.size()));
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const ReportRow& row = r.rows[i];
    const std::string pre = fmt::format("row.{}.", i);
    num(pre + "c", row.kp.c);
    num(pre + "kappa1", row.kp.kappa1);
    num(pre + "kappa2", row.kp.kappa2);
    num(pre + "delta", row.kp.delta());
    kv(pre + "theta", row.theta ? full(*row.theta) : "NA");
    auto put_ci = [&](const std::string& key, const ConfidenceInterval& ci) {
      kv(key + ".target", to_string(ci.target));
      kv(key + ".method", to_string(ci.method));
      num(key + ".lower", ci.lower);
      num(key + ".upper", ci.upper);
      num(key + ".point", ci.point);
      kv(key + ".corrected", ci.corrected ? "1" : "0");
      if (ci.replicate_mean) num(key + ".replicate_mean", *ci.replicate_mean);
      kv(key + ".discarded", std::to_string(ci.discarded));
    };
    for (const auto& e : row.intervals) {
      if (e.ci) {
        put_ci(pre + e.method, *e.ci);
      } else {
        kv(pre + e.method + ".error", e.error);
      }
    }
    if (row.inverse_wald) put_ci(pre + "inverse-wald", *row.inverse_wald);
    if (row.reciprocal_wald) put_ci(pre + "reciprocal-wald", *row.reciprocal_wald);
    if (row.bloch) {
      num(pre + "bloch.z", row.bloch->z_stat);
      num(pre + "bloch.p", row.bloch->p_value);
    } else {
      kv(pre + "bloch.error", row.bloch_error);
    }
    if (row.plan) {
      const SampleSizePlan& p = *row.plan;
      num(pre + "plan.phi", p.phi);
      num(pre + "plan.conf", p.conf);
      kv(pre + "plan.achieved", p.achieved ? "1" : "0");
      kv(pre + "plan.pilot_n", std::to_string(p.pilot_n));
      kv(pre + "plan.n_required", std::to_string(p.n_required));
      kv(pre + "plan.additional", std::to_string(p.additional()));
      num(pre + "plan.n_exact", p.n_exact);
      num(pre + "plan.half_width", p.wald.half_width());
      kv(pre + "plan.corrected", p.corrected ? "1" : "0");
      kv(pre + "plan.iterations", std::to_string(p.iterations));
    } else if (!row.plan_error.empty()) {
      kv(pre + "plan.error", row.plan_error);
    }
  }
  kv("recommendation.method", to_string(r.recommendation.method));
  kv("recommendation.target", to_string(r.recommendation.target));
  kv("recommendation.corrected", r.recommendation.corrected ? "1" : "0");
  kv("recommendation.any_method", r.recommendation.any_method ? "1" : "0");
  kv("recommendation.text", r.recommendation.text);
  kv("warnings", std::to_string(r.warnings.size()));
  for (std::size_t i = 0; i < r.warnings.size(); ++i) {
    kv(fmt::format("warning.{}", i), r.warnings[i]);
  }
  return out;
}

}  // namespace wkappa
