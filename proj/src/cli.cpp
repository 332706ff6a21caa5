#include "wkappa/cli.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "wkappa/error.hpp"
#include "wkappa/kappa_core.hpp"
#include "wkappa/report.hpp"
#include "wkappa/sample_size.hpp"
#include "wkappa/simulation.hpp"

namespace wkappa {

namespace {

struct CountsInput {
  std::vector<std::string> positional;
  std::string records;
  bool given() const { return !positional.empty() || !records.empty(); }
};

struct CommonOptions {
  double conf = 0.95;
  std::size_t bootstrap_b = 2000;
  std::size_t bayes_m = 10000;
  std::string prior = "1,1";
  std::uint64_t seed = 20190611;
  std::vector<std::string> methods;
  unsigned jobs = 1;
};

[[noreturn]] void usage(const std::string& msg) { throw Error(ErrorCode::Usage, msg); }

double parse_count_text(const std::string& text, std::size_t index) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
    usage(fmt::format("count {} ('{}') must be a non-negative integer", index + 1, text));
  }
  return std::stod(text);
}

PairedCounts load_counts(const CountsInput& in) {
  if (!in.positional.empty() && !in.records.empty()) {
    usage("give either eight counts or --records, not both");
  }
  if (!in.records.empty()) return counts_from_records(read_records_file(in.records));
  if (in.positional.size() != 8) {
    usage(fmt::format("expected 8 counts (s11 s10 s01 s00 r11 r10 r01 r00), got {}",
                      in.positional.size()));
  }
  std::array<double, 8> cells{};
  for (std::size_t k = 0; k < 8; ++k) cells[k] = parse_count_text(in.positional[k], k);
  return PairedCounts::from_cells(cells);
}

BetaPrior parse_pair(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) usage(fmt::format("prior '{}' must be 'a,b'", text));
  try {
    std::size_t used_a = 0, used_b = 0;
    const std::string sa = text.substr(0, comma), sb = text.substr(comma + 1);
    BetaPrior p{std::stod(sa, &used_a), std::stod(sb, &used_b)};
    if (used_a != sa.size() || used_b != sb.size()) throw std::invalid_argument(text);
    if (!(p.alpha > 0.0) || !(p.beta > 0.0)) usage("prior parameters must be positive");
    return p;
  } catch (const std::logic_error&) {
    usage(fmt::format("prior '{}' must be 'a,b'", text));
  }
}

// "a,b" for all five parameters, or five pairs "a,b;a,b;a,b;a,b;a,b" in the
// order Se1, Sp1, Se2, Sp2, p.
PriorSet parse_priors(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ';')) parts.push_back(part);
  PriorSet set;
  if (parts.size() == 1) {
    const BetaPrior p = parse_pair(parts[0]);
    set = PriorSet{p, p, p, p, p};
  } else if (parts.size() == 5) {
    set = PriorSet{parse_pair(parts[0]), parse_pair(parts[1]), parse_pair(parts[2]),
                   parse_pair(parts[3]), parse_pair(parts[4])};
  } else {
    usage("--prior takes 'a,b' or five ';'-separated pairs");
  }
  return set;
}

ConfidenceConfig make_config(const CommonOptions& o) {
  ConfidenceConfig cfg;
  cfg.conf = o.conf;
  cfg.bootstrap_resamples = o.bootstrap_b;
  cfg.posterior_draws = o.bayes_m;
  cfg.priors = parse_priors(o.prior);
  cfg.seed = o.seed;
  try {
    cfg.validate();
  } catch (const Error& e) {
    usage(e.what());
  }
  return cfg;
}

void check_methods(const std::vector<std::string>& methods) {
  for (const auto& m : methods) standard_method(m);
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Ingestion, fmt::format("cannot write '{}'", path));
  f << text;
}

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--conf", o.conf, "Confidence level")->capture_default_str();
  cmd->add_option("--bootstrap-b", o.bootstrap_b, "Bootstrap resamples")->capture_default_str();
  cmd->add_option("--bayes-m", o.bayes_m, "Posterior draws")->capture_default_str();
  cmd->add_option("--prior", o.prior, "Beta prior 'a,b' or five ';'-separated pairs")
      ->capture_default_str();
  cmd->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  cmd->add_option("--methods", o.methods, "Comma list of interval methods")->delimiter(',');
  cmd->add_option("--jobs", o.jobs, "Worker threads (simulate)")->capture_default_str();
}

void add_counts(CLI::App* cmd, CountsInput& in) {
  cmd->add_option("counts", in.positional, "s11 s10 s01 s00 r11 r10 r01 r00");
  cmd->add_option("--records", in.records, "Subject file with header d,t1,t2");
}

void check_c(const std::vector<double>& cs) {
  for (double c : cs) {
    if (!(c >= 0.0 && c <= 1.0)) usage(fmt::format("--c {} is outside [0,1]", c));
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compare the weighted kappa coefficients of two binary diagnostic tests"};
  app.require_subcommand(1);

  CountsInput analyze_in;
  CommonOptions analyze_opt;
  std::vector<double> analyze_c;
  double precision = 0.0;
  std::string out_path = "results_kappa.txt";
  std::string machine_path;
  bool auto_correct = true;
  auto* analyze = app.add_subcommand("analyze", "Full analysis report");
  add_counts(analyze, analyze_in);
  add_common(analyze, analyze_opt);
  analyze->add_option("--c", analyze_c, "Weighting index (comma list allowed)")->delimiter(',');
  analyze->add_option("--precision", precision, "Precision for the sample size, 0 = off");
  analyze->add_option("--out", out_path, "Report file")->capture_default_str();
  analyze->add_option("--machine-out", machine_path, "key=value output file");
  analyze->add_flag("--auto-correct,!--no-correct", auto_correct,
                    "Add 0.5 to every cell when n < 100");

  CountsInput curve_in;
  std::optional<double> se1, sp1, se2, sp2, prev;
  std::vector<double> grid;
  int points = 101;
  std::string curve_out = "kappa_curve.csv";
  auto* curve = app.add_subcommand("curve", "Export kappa1(c), kappa2(c)");
  add_counts(curve, curve_in);
  curve->add_option("--se1", se1);
  curve->add_option("--sp1", sp1);
  curve->add_option("--se2", se2);
  curve->add_option("--sp2", sp2);
  curve->add_option("--p", prev, "Prevalence");
  curve->add_option("--grid", grid, "Comma list of c values")->delimiter(',');
  curve->add_option("--points", points, "Evenly spaced points on [0,1]")->capture_default_str();
  curve->add_option("--out", curve_out, "CSV output")->capture_default_str();

  CountsInput plan_in;
  CommonOptions plan_opt;
  double plan_c = 0.0, plan_phi = 0.0;
  int plan_round = 1;
  bool plan_swap = false;
  auto* plan = app.add_subcommand("plan", "One round of sample-size planning");
  add_counts(plan, plan_in);
  add_common(plan, plan_opt);
  plan->add_option("--c", plan_c, "Weighting index")->required();
  plan->add_option("--precision", plan_phi, "Target half-width for kappa1/kappa2")->required();
  plan->add_option("--round", plan_round, "Planning round number")->capture_default_str();
  plan->add_flag("--swap", plan_swap, "Relabel test 1 as test 2 and vice versa");

  CommonOptions sim_opt;
  std::string batch_path;
  std::string sim_out = "coverage.csv";
  bool sim_correct = false;
  auto* simulate = app.add_subcommand("simulate", "Coverage study over a scenario batch");
  add_common(simulate, sim_opt);
  simulate->add_option("--batch", batch_path, "Scenario file")->required();
  simulate->add_option("--out", sim_out, "Coverage report")->capture_default_str();
  simulate->add_flag("--correct", sim_correct, "Add 0.5 to every cell of every sample");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (analyze->parsed()) {
      check_c(analyze_c);
      if (precision < 0.0) usage("--precision must be non-negative");
      AnalysisOptions opt;
      opt.c_values = analyze_c;
      opt.config = make_config(analyze_opt);
      opt.precision = precision;
      opt.methods = analyze_opt.methods;
      opt.auto_correct = auto_correct;
      check_methods(opt.methods);
      const PairedCounts counts = load_counts(analyze_in);
      const AnalysisReport report = build_report(counts, opt);
      const std::string human = render_human(report);
      out << human;
      if (!out_path.empty()) write_file(out_path, human);
      if (!machine_path.empty()) write_file(machine_path, render_machine(report));
      return 0;
    }

    if (curve->parsed()) {
      AccuracyEstimates acc;
      if (curve_in.given()) {
        acc = accuracy_from_counts(load_counts(curve_in));
      } else {
        if (!se1 || !sp1 || !se2 || !sp2 || !prev) {
          usage("curve needs counts, --records, or all of --se1 --sp1 --se2 --sp2 --p");
        }
        acc.se1 = *se1;
        acc.sp1 = *sp1;
        acc.se2 = *se2;
        acc.sp2 = *sp2;
        acc.p = *prev;
      }
      if (!(acc.youden(1) > kYoudenTolerance) || !(acc.youden(2) > kYoudenTolerance)) {
        throw Error(ErrorCode::InfeasibleScenario,
                    "infeasible parameters: both Youden indices must be positive");
      }
      if (grid.empty()) {
        if (points < 1) usage("--points must be at least 1");
        for (int k = 0; k < points; ++k) {
          grid.push_back(points == 1 ? 0.0 : static_cast<double>(k) / (points - 1));
        }
      }
      check_c(grid);
      const auto rows = kappa_curve(acc, grid);
      std::ofstream f(curve_out, std::ios::binary);
      if (!f) throw Error(ErrorCode::Ingestion, fmt::format("cannot write '{}'", curve_out));
      write_curve_csv(f, rows);
      const auto cp = crossover_index(acc);
      if (cp) {
        fmt::print(out, "crossover c' = {:.4f}\n", *cp);
      } else {
        out << "crossover c' undefined\n";
      }
      fmt::print(out, "{} rows written to {}\n", rows.size(), curve_out);
      return 0;
    }

    if (plan->parsed()) {
      check_c({plan_c});
      if (!(plan_phi > 0.0)) usage("--precision must be positive");
      const ConfidenceConfig cfg = make_config(plan_opt);
      PairedCounts counts = load_counts(plan_in);
      if (plan_swap) counts = swap_tests(counts);
      accuracy_from_counts(counts);
      const SampleSizePlan p = plan_iteration(counts, plan_c, plan_phi, cfg.conf, cfg, plan_round);
      fmt::print(out, "round {}: pilot n = {}, Wald interval for the ratio ({:.3f}, {:.3f}), "
                      "half-width {:.4f}\n",
                 p.iterations, p.pilot_n, p.wald.lower, p.wald.upper, p.wald.half_width());
      if (p.corrected) out << "0.5 added to every cell of the pilot\n";
      if (p.achieved) {
        fmt::print(out, "precision {} reached; n = {}\n", p.phi, p.n_required);
      } else {
        fmt::print(out, "n = {}; add {} subjects\n", p.n_required, p.additional());
      }
      for (const auto& w : p.warnings) out << "warning: " << w << '\n';
      return 0;
    }

    if (simulate->parsed()) {
      ConfidenceConfig cfg = make_config(sim_opt);
      cfg.continuity_correction = sim_correct;
      std::vector<std::string> names = sim_opt.methods;
      if (names.empty()) names = {"wald-diff", "wald-ratio", "log-ratio", "fieller-ratio"};
      std::vector<CoverageMethod> methods;
      for (const auto& name : names) methods.push_back(standard_method(name));
      const auto rows = read_batch_file(batch_path);
      std::vector<CoverageResult> results;
      std::vector<std::size_t> scenario_of;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const BatchRow& b = rows[i];
        const Scenario sc =
            build_scenario_from_kappas(b.k0_1, b.k1_1, b.k0_2, b.k1_2, b.p, b.c, b.f);
        StudyOptions so;
        so.replicates = b.N;
        so.jobs = sim_opt.jobs;
        so.seed = cfg.seed;
        so.stream_id = i;
        for (auto& r : coverage_study(sc, b.n, methods, cfg, so)) {
          results.push_back(std::move(r));
          scenario_of.push_back(i);
        }
      }
      std::ostringstream report, detail;
      write_coverage_report(report, results);
      write_coverage_detail(detail, scenario_of, results);
      write_file(sim_out, report.str());
      write_file(sim_out + ".detail.csv", detail.str());
      out << report.str();
      return 0;
    }
  } catch (const Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return e.code() == ErrorCode::Usage ? 2 : 1;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return 1;
  }
  return 2;
}

}  // namespace wkappa
