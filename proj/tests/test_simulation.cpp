#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "wkappa/error.hpp"
#include "wkappa/simulation.hpp"

using namespace wkappa;

namespace {

Scenario low_kappa() { return build_scenario_from_kappas(0.21, 0.14, 0.81, 0.72, 0.5, 0.1, 0.5); }

std::vector<CoverageMethod> methods(std::initializer_list<const char*> names) {
  std::vector<CoverageMethod> out;
  for (const char* n : names) out.push_back(standard_method(n));
  return out;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::Domain;
}

}  // namespace

TEST_CASE("dependence bounds") {
  const auto [e1, e0] = dependence_bounds(0.484, 0.852, 0.684, 0.911);
  CHECK(e1 == doctest::Approx(std::min(0.484 * 0.148, 0.852 * 0.516)));
  CHECK(std::round(e1 * 1e4) / 1e4 == doctest::Approx(0.0716));
  CHECK(std::round(e1 / 2 * 1e4) / 1e4 == doctest::Approx(0.0358));
  CHECK(e0 == doctest::Approx(std::min(0.684 * 0.089, 0.911 * 0.316)));
  CHECK(dependence_bounds(1, 1, 0.7, 0.8).first == 0.0);
  CHECK(dependence_bounds(0.5, 0.5, 0.7, 0.8).first == doctest::Approx(0.25));
}

TEST_CASE("scenario probabilities") {
  const auto ind = scenario_probabilities(0.7, 0.8, 0.6, 0.9, 0.3, 0, 0, 0.5);
  CHECK(ind.pi[0] == doctest::Approx(0.3 * 0.7 * 0.6).epsilon(1e-15));
  CHECK(std::accumulate(ind.pi.begin(), ind.pi.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ind.pi[0] + ind.pi[1] + ind.pi[2] + ind.pi[3] == doctest::Approx(0.3).epsilon(1e-14));

  const auto [e1, e0] = dependence_bounds(0.484, 0.852, 0.684, 0.911);
  const auto t3 = scenario_probabilities(0.484, 0.684, 0.852, 0.911, 0.5, e1 / 2, e0 / 2, 0.1);
  CHECK(std::fabs(t3.kappa1 - 0.2) < 0.005);
  CHECK(std::fabs(t3.kappa2 - 0.8) < 0.005);
  for (double x : t3.pi) CHECK(x >= 0.0);

  const auto via_cells = kappa_pair_from_cells(PairedCounts::from_cells(t3.pi), 0.1);
  CHECK(via_cells.kappa1 == doctest::Approx(t3.kappa1).epsilon(1e-12));
  CHECK(via_cells.kappa2 == doctest::Approx(t3.kappa2).epsilon(1e-12));

  CHECK(code_of([] { scenario_probabilities(0.5, 0.5, 0.5, 0.5, 0.5, 0.4, 0, 0.5); }) ==
        ErrorCode::InfeasibleScenario);
}

TEST_CASE("scenarios built from kappas") {
  const auto s = low_kappa();
  CHECK(std::round(s.se1 * 1000) / 1000 == doctest::Approx(0.484));
  CHECK(std::round(s.sp1 * 1000) / 1000 == doctest::Approx(0.684));
  CHECK(std::round(s.se2 * 1000) / 1000 == doctest::Approx(0.852));
  CHECK(std::round(s.sp2 * 1000) / 1000 == doctest::Approx(0.911));
  CHECK(std::fabs(s.eps1 - 0.0359) < 0.0005);
  CHECK(std::fabs(s.eps0 - 0.0306) < 0.0005);
  CHECK(s.theta() == doctest::Approx(s.kappa1 / s.kappa2));
  CHECK(s.true_value(IntervalTarget::Difference) == doctest::Approx(s.delta()));

  const auto ind = build_scenario_from_kappas(0.21, 0.14, 0.81, 0.72, 0.5, 0.1, 0.0);
  CHECK(ind.eps1 == 0.0);
  CHECK(ind.eps0 == 0.0);
  CHECK(ind.pi[0] == doctest::Approx(ind.p * ind.se1 * ind.se2).epsilon(1e-14));

  const auto high = build_scenario_from_kappas(0.21, 0.14, 0.81, 0.72, 0.5, 0.1, 0.8);
  const auto [m1, m0] = dependence_bounds(high.se1, high.se2, high.sp1, high.sp2);
  CHECK(high.eps1 == doctest::Approx(0.8 * m1).epsilon(1e-14));
  CHECK(high.eps0 == doctest::Approx(0.8 * m0).epsilon(1e-14));

  CHECK_THROWS_AS(build_scenario_from_kappas(0.2, 0.2, 0.8, 0.8, 0.5, 0.1, 1.5), Error);
  CHECK_THROWS_AS(build_scenario_from_kappas(0.0, 0.2, 0.8, 0.8, 0.5, 0.1, 0.5), Error);
}

TEST_CASE("sampling counts") {
  Scenario mass = low_kappa();
  mass.pi = {1, 0, 0, 0, 0, 0, 0, 0};
  RandomStream s(5, 0);
  const auto pm = sample_counts(mass, 300, s);
  CHECK(pm.s11 == 300);
  CHECK(pm.n() == 300);

  const auto sc = low_kappa();
  std::array<double, 8> totals{};
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const auto cells = sample_counts(sc, 300, s).cells();
    CHECK_FALSE(std::accumulate(cells.begin(), cells.end(), 0.0) != 300.0);
    for (int k = 0; k < 8; ++k) totals[k] += cells[k];
  }
  const double m = 300.0 * draws;
  for (int k = 0; k < 8; ++k) {
    const double se = std::sqrt(sc.pi[k] * (1 - sc.pi[k]) / m);
    CHECK(std::fabs(totals[k] / m - sc.pi[k]) <= 4 * se);
  }
}

TEST_CASE("coverage of the low-kappa scenario at n = 500") {
  const ConfidenceConfig cfg;
  StudyOptions opt;
  opt.replicates = 2000;
  const auto res = coverage_study(low_kappa(), 500, methods({"wald-diff", "wald-ratio"}), cfg, opt);
  REQUIRE(res.size() == 2);
  CHECK(std::fabs(res[0].cp - 0.955) <= 0.015);
  CHECK(std::fabs(res[0].al - 0.214) <= 0.01);
  CHECK(std::fabs(res[1].cp - 0.957) <= 0.015);
  CHECK(res[0].failed.has_value());
  CHECK(res[0].N == 2000);
  CHECK(res[1].target == IntervalTarget::Ratio);
}

TEST_CASE("an interval covering everything has coverage 1") {
  CoverageMethod all{"all", IntervalTarget::Difference,
                     [](const PairedCounts&, double, const ConfidenceConfig&, RandomStream&) {
                       ConfidenceInterval ci;
                       ci.lower = -std::numeric_limits<double>::infinity();
                       ci.upper = std::numeric_limits<double>::infinity();
                       return ci;
                     }};
  StudyOptions opt;
  opt.replicates = 100;
  const auto res = coverage_study(low_kappa(), 50, {all}, ConfidenceConfig{}, opt);
  CHECK(res[0].cp == 1.0);
  CHECK(res[0].invalid == 0);

  opt.replicates = 99;
  CHECK_THROWS_AS(coverage_study(low_kappa(), 50, {all}, ConfidenceConfig{}, opt), Error);
}

TEST_CASE("Wald length shrinks like 1/sqrt(n)") {
  const ConfidenceConfig cfg;
  StudyOptions opt;
  opt.replicates = 1000;
  const auto m = methods({"wald-diff", "wald-ratio"});
  for (const auto& sc : {low_kappa(), build_scenario_from_kappas(0.3, 0.6, 0.8, 0.8, 0.25, 0.5, 0.5)}) {
    const auto big = coverage_study(sc, 1000, m, cfg, opt);
    const auto small = coverage_study(sc, 250, m, cfg, opt);
    for (std::size_t i = 0; i < m.size(); ++i) {
      const double r = big[i].al / small[i].al;
      CHECK(r >= 0.45);
      CHECK(r <= 0.55);
    }
  }
}

TEST_CASE("studies do not depend on the worker count") {
  const ConfidenceConfig cfg;
  StudyOptions opt;
  opt.replicates = 300;
  opt.seed = 99;
  const auto m = methods({"wald-diff", "log-ratio", "boot-ratio"});
  ConfidenceConfig small = cfg;
  small.bootstrap_resamples = 200;
  const auto a = coverage_study(low_kappa(), 200, m, small, opt);
  opt.jobs = 3;
  const auto b = coverage_study(low_kappa(), 200, m, small, opt);
  std::ostringstream sa, sb;
  write_coverage_report(sa, a);
  write_coverage_report(sb, b);
  CHECK(sa.str() == sb.str());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].cp == b[i].cp);
    CHECK(a[i].al == b[i].al);
  }
}

TEST_CASE("failure rule and recommendations") {
  CHECK(evaluate_failure(0.912, 0.95));
  CHECK_FALSE(evaluate_failure(0.937, 0.95));
  CHECK(evaluate_failure(0.930, 0.95));
  CHECK(code_of([] { evaluate_failure(0.9, 0.90); }) == ErrorCode::UnsupportedNominal);

  auto r = recommend_method(80);
  CHECK(r.method == IntervalMethod::Wald);
  CHECK(r.target == IntervalTarget::Ratio);
  CHECK(r.corrected);
  r = recommend_method(250);
  CHECK(r.method == IntervalMethod::Wald);
  CHECK_FALSE(r.corrected);
  r = recommend_method(450);
  CHECK(r.method == IntervalMethod::Wald);
  CHECK_FALSE(r.any_method);
  r = recommend_method(1000);
  CHECK(r.any_method);
}

TEST_CASE("standard methods") {
  for (const auto& name : standard_method_names()) CHECK(standard_method(name).name == name);
  CHECK(code_of([] { standard_method("percentile-t"); }) == ErrorCode::Usage);
}

TEST_CASE("batch files") {
  std::istringstream good(
      "k0_1,k1_1,k0_2,k1_2,p,c,f,n,N\n# comment\n\n0.21,0.14,0.81,0.72,0.5,0.1,0.5,500,2000\n");
  const auto rows = read_batch(good);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].n == 500);
  CHECK(rows[0].N == 2000);

  std::istringstream bad("k0_1,k1_1,k0_2,k1_2,p,c,f,n,N\n0.2,0.2,0.8,0.8,0.5,0.1,0.5,500,2000\n0.2,x\n");
  try {
    read_batch(bad);
    FAIL("expected an ingestion error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Ingestion);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }

  std::istringstream zero("k0_1,k1_1,k0_2,k1_2,p,c,f,n,N\n0.2,0.2,0.8,0.8,0.5,0.1,0.5,500,0\n");
  CHECK(code_of([&] { read_batch(zero); }) == ErrorCode::Usage);
  std::istringstream header("a,b\n");
  CHECK_THROWS_AS(read_batch(header), Error);
  CHECK_THROWS_AS(read_batch_file("/nonexistent/batch.csv"), Error);
}

TEST_CASE("coverage report format") {
  CoverageResult r;
  r.method = "wald-diff";
  r.n = 500;
  r.N = 2000;
  r.cp = 0.95;
  r.al = 0.2;
  r.failed = false;
  std::ostringstream os;
  write_coverage_report(os, {r});
  CHECK(os.str() == "method,target,n,N,cp,al,failed,redraws\nwald-diff,difference,500,2000,0.950000,0.200000,0,0\n");
}
