#include "wkappa/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "wkappa/error.hpp"

namespace wkappa {

double Scenario::theta() const {
  if (kappa2 == 0.0) throw Error(ErrorCode::RatioUndefined, "scenario has kappa2 = 0");
  return kappa1 / kappa2;
}

double Scenario::true_value(IntervalTarget target) const {
  switch (target) {
    case IntervalTarget::Difference: return delta();
    case IntervalTarget::Ratio: return theta();
    case IntervalTarget::InverseRatio: {
      if (kappa1 == 0.0) throw Error(ErrorCode::RatioUndefined, "scenario has kappa1 = 0");
      return kappa2 / kappa1;
    }
  }
  return 0.0;
}

AccuracyEstimates Scenario::accuracy() const {
  return AccuracyEstimates{se1, sp1, se2, sp2, p, eps1, eps0};
}

std::pair<double, double> dependence_bounds(double se1, double se2, double sp1, double sp2) {
  return {std::min(se1 * (1.0 - se2), se2 * (1.0 - se1)),
          std::min(sp1 * (1.0 - sp2), sp2 * (1.0 - sp1))};
}

Scenario scenario_probabilities(double se1, double sp1, double se2, double sp2, double p,
                                double eps1, double eps0, double c) {
  for (double v : {se1, sp1, se2, sp2}) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorCode::Domain, "sensitivities and specificities must lie in [0,1]");
    }
  }
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::Domain, "prevalence must lie in (0,1)");
  if (!(c >= 0.0 && c <= 1.0)) throw Error(ErrorCode::Domain, "c must lie in [0,1]");
  if (!std::isfinite(eps1) || !std::isfinite(eps0)) {
    throw Error(ErrorCode::Domain, "dependence factors must be finite");
  }

  Scenario s;
  s.se1 = se1;
  s.sp1 = sp1;
  s.se2 = se2;
  s.sp2 = sp2;
  s.p = p;
  s.eps1 = eps1;
  s.eps0 = eps0;
  s.c = c;
  const double q = 1.0 - p;
  std::size_t k = 0;
  for (int i = 1; i >= 0; --i) {
    for (int j = 1; j >= 0; --j) {
      const double sign = i == j ? 1.0 : -1.0;
      const double a = (i ? se1 : 1.0 - se1) * (j ? se2 : 1.0 - se2);
      s.pi[k++] = p * (a + sign * eps1);
    }
  }
  for (int i = 1; i >= 0; --i) {
    for (int j = 1; j >= 0; --j) {
      const double sign = i == j ? 1.0 : -1.0;
      const double b = (i ? 1.0 - sp1 : sp1) * (j ? 1.0 - sp2 : sp2);
      s.pi[k++] = q * (b + sign * eps0);
    }
  }
  for (std::size_t m = 0; m < s.pi.size(); ++m) {
    if (s.pi[m] < -1e-12) {
      throw Error(ErrorCode::InfeasibleScenario,
                  fmt::format("infeasible scenario: cell {} has probability {:.3g}", m + 1,
                              s.pi[m]));
    }
    s.pi[m] = std::max(0.0, s.pi[m]);
  }
  s.kappa1 = weighted_kappa(se1, sp1, p, c);
  s.kappa2 = weighted_kappa(se2, sp2, p, c);
  return s;
}

Scenario build_scenario_from_kappas(double k0_1, double k1_1, double k0_2, double k1_2,
                                    double p, double c, double f) {
  if (!(f >= 0.0 && f <= 1.0)) {
    throw Error(ErrorCode::Domain, "dependence fraction must lie in [0,1]");
  }
  const auto [se1, sp1] = accuracy_from_kappa_pair(k0_1, k1_1, p);
  const auto [se2, sp2] = accuracy_from_kappa_pair(k0_2, k1_2, p);
  const auto [b1, b0] = dependence_bounds(se1, se2, sp1, sp2);
  return scenario_probabilities(se1, sp1, se2, sp2, p, f * b1, f * b0, c);
}

PairedCounts sample_counts(const Scenario& scenario, std::int64_t n, RandomStream& stream) {
  if (n < 1) throw Error(ErrorCode::Domain, "sample size must be at least 1");
  const auto cells = sample_multinomial(scenario.pi, n, stream);
  std::array<double, 8> out{};
  for (std::size_t k = 0; k < 8; ++k) out[k] = static_cast<double>(cells[k]);
  return PairedCounts::from_cells(out);
}

CoverageMethod standard_method(const std::string& name) {
  using Ci = ConfidenceInterval;
  CoverageMethod m;
  m.name = name;
  if (name == "wald-diff") {
    m.compute = [](const PairedCounts& x, double c, const ConfidenceConfig& cfg,
                   RandomStream&) -> Ci { return wald_diff_ci(x, c, cfg); };
  } else if (name == "boot-diff") {
    m.compute = [](const PairedCounts& x, double c, const ConfidenceConfig& cfg,
                   RandomStream& rs) -> Ci {
      return bootstrap_ci(x, c, IntervalTarget::Difference, cfg, rs);
    };
  } else if (name == "bayes-diff") {
    m.compute = [](const PairedCounts& x, double c, const ConfidenceConfig& cfg,
                   RandomStream& rs) -> Ci {
      return bayesian_ci(x, c, IntervalTarget::Difference, cfg, rs);
    };
  } else {
    m.target = IntervalTarget::Ratio;
    if (name == "wald-ratio") {
      m.compute = [](const PairedCounts& x, double c, const ConfidenceConfig& cfg,
                     RandomStream&) -> Ci { return wald_ratio_ci(x, c, cfg); };
    } else if (name == "log-ratio") {
      m.compute = [](const PairedCounts& x, double c, const ConfidenceConfig& cfg,
                     RandomStream&) -> Ci { return log_ratio_ci(x, c, cfg); };
    } else if (name == "fieller-ratio") {
      m.compute = [](const PairedCounts& x, double c, const ConfidenceConfig& cfg,
                     RandomStream&) -> Ci { return fieller_ratio_ci(x, c, cfg); };
    } else if (name == "boot-ratio") {
      m.compute = [](const PairedCounts& x, double c, const ConfidenceConfig& cfg,
                     RandomStream& rs) -> Ci {
        return bootstrap_ci(x, c, IntervalTarget::Ratio, cfg, rs);
      };
    } else if (name == "bayes-ratio") {
      m.compute = [](const PairedCounts& x, double c, const ConfidenceConfig& cfg,
                     RandomStream& rs) -> Ci {
        return bayesian_ci(x, c, IntervalTarget::Ratio, cfg, rs);
      };
    } else {
      throw Error(ErrorCode::Usage, fmt::format("unknown interval method '{}'", name));
    }
  }
  return m;
}

std::vector<std::string> standard_method_names() {
  return {"wald-diff",     "boot-diff",  "bayes-diff", "wald-ratio",
          "log-ratio",     "fieller-ratio", "boot-ratio", "bayes-ratio"};
}

namespace {

// FNV-1a, so a method's stream does not depend on its position in the list.
std::uint64_t name_key(const std::string& name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : name) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::size_t kMaxRedrawsPerReplicate = 10000;

}  // namespace

std::vector<CoverageResult> coverage_study(const Scenario& scenario, std::int64_t n,
                                           const std::vector<CoverageMethod>& methods,
                                           const ConfidenceConfig& config,
                                           const StudyOptions& options) {
  if (options.replicates < 100) {
    throw Error(ErrorCode::Domain, "a coverage study needs at least 100 replicates");
  }
  if (n < 1) throw Error(ErrorCode::Domain, "sample size must be at least 1");
  config.validate();

  const std::size_t N = options.replicates;
  const std::size_t M = methods.size();
  std::vector<double> truth(M);
  std::vector<std::uint64_t> keys(M);
  for (std::size_t m = 0; m < M; ++m) {
    truth[m] = scenario.true_value(methods[m].target);
    keys[m] = name_key(methods[m].name);
  }

  std::vector<unsigned char> covered(M * N, 0);
  std::vector<unsigned char> valid(M * N, 0);
  std::vector<double> length(M * N, 0.0);
  std::vector<std::size_t> redraws(N, 0);

  const RandomStream base(options.seed, options.stream_id);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    try {
      for (std::size_t k = next++; k < N; k = next++) {
        RandomStream rep = base.substream(k);
        PairedCounts x = sample_counts(scenario, n, rep);
        while (!config.continuity_correction && (x.s() == 0.0 || x.r() == 0.0)) {
          if (++redraws[k] > kMaxRedrawsPerReplicate) {
            throw Error(ErrorCode::InfeasibleScenario,
                        "coverage study: estimable samples are too rare at this n");
          }
          x = sample_counts(scenario, n, rep);
        }
        for (std::size_t m = 0; m < M; ++m) {
          RandomStream ms = rep.substream(keys[m]);
          const std::size_t slot = m * N + k;
          try {
            const ConfidenceInterval ci = methods[m].compute(x, scenario.c, config, ms);
            if (std::isnan(ci.lower) || std::isnan(ci.upper)) continue;
            valid[slot] = 1;
            covered[slot] = ci.contains(truth[m]) ? 1 : 0;
            length[slot] = ci.upper - ci.lower;
          } catch (const Error&) {
          }
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = N;
    }
  };

  unsigned jobs = options.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                    : options.jobs;
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, N));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::size_t total_redraws = 0;
  for (std::size_t r : redraws) total_redraws += r;

  std::vector<CoverageResult> out;
  out.reserve(M);
  for (std::size_t m = 0; m < M; ++m) {
    CoverageResult res;
    res.method = methods[m].name;
    res.target = methods[m].target;
    res.n = n;
    res.N = N;
    res.true_value = truth[m];
    res.redraws = total_redraws;
    std::size_t hits = 0, ok = 0;
    double len = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
      const std::size_t slot = m * N + k;
      if (!valid[slot]) continue;
      ++ok;
      hits += covered[slot];
      len += length[slot];
    }
    res.invalid = N - ok;
    res.cp = static_cast<double>(hits) / static_cast<double>(N);
    res.cp_valid = ok ? static_cast<double>(hits) / static_cast<double>(ok) : std::nan("");
    res.al = ok ? len / static_cast<double>(ok) : std::nan("");
    if (std::fabs(config.conf - 0.95) < 1e-12) res.failed = evaluate_failure(res.cp, 0.95);
    out.push_back(std::move(res));
  }
  return out;
}

bool evaluate_failure(double cp, double nominal) {
  if (std::fabs(nominal - 0.95) > 1e-12) {
    throw Error(ErrorCode::UnsupportedNominal,
                fmt::format("the failure rule is defined only at 95% nominal, not {}", nominal));
  }
  return cp <= 0.93 + 1e-12;
}

Recommendation recommend_method(std::int64_t n) {
  if (n < 1) throw Error(ErrorCode::Domain, "sample size must be at least 1");
  Recommendation r;
  r.method = IntervalMethod::Wald;
  r.target = IntervalTarget::Ratio;
  if (n < 100) {
    r.corrected = true;
    r.text = "n < 100: use the Wald interval for the ratio with 0.5 added to every cell";
  } else if (n <= 400) {
    r.text = "100 <= n <= 400: use the Wald interval for the ratio without correction";
  } else if (n < 500) {
    r.text = "400 < n < 500: use the Wald interval for the ratio without correction";
  } else {
    r.any_method = true;
    r.text = "n >= 500: any of the intervals may be used, without correction";
  }
  return r;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_real(const std::string& text, std::size_t line, const char* name) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (text.empty() || end != begin + text.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::Ingestion,
                fmt::format("line {}: field {} is not a number: '{}'", line, name, text));
  }
  return v;
}

std::int64_t parse_count(const std::string& text, std::size_t line, const char* name) {
  const double v = parse_real(text, line, name);
  if (v != std::floor(v) || v < 0.0 || v > 9e15) {
    throw Error(ErrorCode::Ingestion,
                fmt::format("line {}: field {} must be a non-negative integer", line, name));
  }
  return static_cast<std::int64_t>(v);
}

}  // namespace

std::vector<BatchRow> read_batch(std::istream& in) {
  static const char* kHeader = "k0_1,k1_1,k0_2,k1_2,p,c,f,n,N";
  static const char* kNames[] = {"k0_1", "k1_1", "k0_2", "k1_2", "p", "c", "f", "n", "N"};
  std::vector<BatchRow> rows;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != kHeader) {
        throw Error(ErrorCode::Ingestion,
                    fmt::format("line {}: expected header '{}'", lineno, kHeader));
      }
      header = true;
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() != 9) {
      throw Error(ErrorCode::Ingestion,
                  fmt::format("line {}: expected 9 fields, found {}", lineno, fields.size()));
    }
    BatchRow row;
    double* reals[] = {&row.k0_1, &row.k1_1, &row.k0_2, &row.k1_2, &row.p, &row.c, &row.f};
    for (std::size_t k = 0; k < 7; ++k) *reals[k] = parse_real(fields[k], lineno, kNames[k]);
    row.n = parse_count(fields[7], lineno, kNames[7]);
    const std::int64_t big_n = parse_count(fields[8], lineno, kNames[8]);
    if (row.n < 1) {
      throw Error(ErrorCode::Usage, fmt::format("line {}: n must be at least 1", lineno));
    }
    if (big_n < 100) {
      throw Error(ErrorCode::Usage,
                  fmt::format("line {}: N must be at least 100, got {}", lineno, big_n));
    }
    row.N = static_cast<std::size_t>(big_n);
    rows.push_back(row);
  }
  if (!header) throw Error(ErrorCode::Ingestion, "batch file is empty");
  return rows;
}

std::vector<BatchRow> read_batch_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Ingestion, fmt::format("cannot open batch file '{}'", path));
  return read_batch(in);
}

namespace {

std::string failed_field(const CoverageResult& r) {
  if (!r.failed) return "NA";
  return *r.failed ? "1" : "0";
}

}  // namespace

void write_coverage_report(std::ostream& out, const std::vector<CoverageResult>& rows) {
  out << "method,target,n,N,cp,al,failed,redraws\n";
  for (const auto& r : rows) {
    fmt::print(out, "{},{},{},{},{:.6f},{:.6f},{},{}\n", r.method, to_string(r.target), r.n,
               r.N, r.cp, r.al, failed_field(r), r.redraws);
  }
}

void write_coverage_detail(std::ostream& out, const std::vector<std::size_t>& scenario,
                           const std::vector<CoverageResult>& rows) {
  out << "scenario,method,target,n,N,cp,cp_valid,invalid,true_value,al,failed,redraws\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    fmt::print(out, "{},{},{},{},{},{:.6f},{:.6f},{},{:.17g},{:.6f},{},{}\n",
               i < scenario.size() ? scenario[i] : 0, r.method, to_string(r.target), r.n, r.N,
               r.cp, r.cp_valid, r.invalid, r.true_value, r.al, failed_field(r), r.redraws);
  }
}

}  // namespace wkappa
