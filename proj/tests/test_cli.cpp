#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "wkappa/cli.hpp"
#include "wkappa/error.hpp"
#include "wkappa/report.hpp"

using namespace wkappa;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "wkappa");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "wkappa_cli_tests";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> parse_machine(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

double num(const std::map<std::string, std::string>& kv, const std::string& key) {
  const auto it = kv.find(key);
  REQUIRE_MESSAGE(it != kv.end(), key);
  return std::stod(it->second);
}

std::vector<std::vector<double>> read_csv(const fs::path& p) {
  std::ifstream f(p);
  std::string line;
  std::getline(f, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(f, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

// c at which kappa1 - kappa2 changes sign, by linear interpolation.
double crossing(const std::vector<std::vector<double>>& rows) {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double a = rows[i - 1][1] - rows[i - 1][2];
    const double b = rows[i][1] - rows[i][2];
    if (a == 0) return rows[i - 1][0];
    if ((a > 0) != (b > 0)) return rows[i - 1][0] + a / (a - b) * (rows[i][0] - rows[i - 1][0]);
  }
  return NAN;
}

const std::vector<std::string> kMalaria{"41", "0", "40", "8", "5", "1", "24", "181"};

std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string>& tail) {
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

}  // namespace

TEST_CASE("analyze reproduces the malaria row at c = 0.5") {
  const auto dir = temp_dir();
  const auto human = (dir / "r.txt").string(), machine = (dir / "m.txt").string();
  const auto r = run(with(with({"analyze"}, kMalaria),
                          {"--c", "0.5", "--out", human, "--machine-out", machine}));
  REQUIRE(r.code == 0);
  CHECK(slurp(human) == r.out);
  const auto kv = parse_machine(slurp(machine));
  CHECK(std::round(num(kv, "row.0.kappa1") * 1000) / 1000 == doctest::Approx(0.501));
  CHECK(std::round(num(kv, "row.0.kappa2") * 1000) / 1000 == doctest::Approx(0.723));
  CHECK(std::fabs(num(kv, "row.0.delta") + 0.222) <= 0.001);
  CHECK(std::round(num(kv, "row.0.wald-diff.lower") * 1000) / 1000 == doctest::Approx(-0.345));
  CHECK(std::round(num(kv, "row.0.wald-diff.upper") * 1000) / 1000 == doctest::Approx(-0.100));
  CHECK(r.out.find("(-0.345, -0.100)") != std::string::npos);
}

TEST_CASE("analyze prints the sample size") {
  const auto out = (temp_dir() / "r2.txt").string();
  const auto r = run(with(with({"analyze"}, kMalaria), {"--c", "0.9", "--precision", "0.10", "--out", out}));
  REQUIRE(r.code == 0);
  CHECK(r.out.find("n = 435; add 135 subjects") != std::string::npos);
}

TEST_CASE("analyze rejects bad input") {
  const auto out = (temp_dir() / "r3.txt").string();
  auto r = run({"analyze", "1", "0", "0", "0", "0", "0", "0", "0", "--c", "0.5", "--out", out});
  CHECK(r.code == 1);
  CHECK(r.err.find("r = 0") != std::string::npos);
  CHECK(r.err.find("not estimable") != std::string::npos);

  r = run({"analyze", "41", "0", "40", "8", "5", "1", "24", "-3", "--out", out});
  CHECK(r.code == 2);
  r = run({"analyze", "41", "0", "40", "8", "5", "1", "24", "2.5", "--out", out});
  CHECK(r.code == 2);
  CHECK(r.err.find("count 8") != std::string::npos);
  r = run({"analyze", "41", "0", "40", "8", "5", "1", "24", "--out", out});
  CHECK(r.code == 2);
  r = run(with(with({"analyze"}, kMalaria), {"--c", "1.5", "--out", out}));
  CHECK(r.code == 2);
  r = run(with(with({"analyze"}, kMalaria), {"--methods", "nonsense", "--out", out}));
  CHECK(r.code == 2);
  r = run(with(with({"analyze"}, kMalaria), {"--prior", "1,0", "--out", out}));
  CHECK(r.code == 2);
  r = run({"frobnicate"});
  CHECK(r.code == 2);
}

TEST_CASE("analyze reads subject records") {
  const auto dir = temp_dir();
  const auto path = dir / "records.csv";
  {
    std::ofstream f(path);
    f << "d,t1,t2\n";
    const int cells[8] = {41, 0, 40, 8, 5, 1, 24, 181};
    for (int k = 0; k < 8; ++k) {
      for (int i = 0; i < cells[k]; ++i) {
        f << (k < 4 ? 1 : 0) << ',' << ((k % 4) < 2 ? 1 : 0) << ',' << (k % 2 == 0 ? 1 : 0) << '\n';
      }
    }
  }
  const auto a = run({"analyze", "--records", path.string(), "--c", "0.9", "--out", (dir / "a.txt").string()});
  const auto b = run(with(with({"analyze"}, kMalaria), {"--c", "0.9", "--out", (dir / "b.txt").string()}));
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("human and machine reports agree") {
  const auto dir = temp_dir();
  const auto machine = (dir / "mm.txt").string();
  for (const auto& counts : {kMalaria, std::vector<std::string>{"10", "2", "3", "4", "1", "2", "2", "30"}}) {
    const auto r = run(with(with({"analyze"}, counts), {"--precision", "0.05", "--out",
                                                         (dir / "hh.txt").string(),
                                                         "--machine-out", machine}));
    REQUIRE(r.code == 0);
    std::vector<double> values;
    for (const auto& [k, v] : parse_machine(slurp(machine))) {
      try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used == v.size()) values.push_back(x);
      } catch (const std::exception&) {
      }
    }
    const std::regex number(R"((^|[^A-Za-z_.0-9'])(-?\d+(\.\d+)?))");
    std::istringstream in(r.out);
    std::string line;
    int checked = 0;
    while (std::getline(in, line)) {
      if (line.rfind("recommendation", 0) == 0 || line.rfind("rule", 0) == 0 ||
          line.rfind("warning", 0) == 0 || line.rfind("Weighted", 0) == 0) {
        continue;
      }
      for (auto it = std::sregex_iterator(line.begin(), line.end(), number);
           it != std::sregex_iterator(); ++it) {
        const std::string tok = (*it)[2];
        const auto dot = tok.find('.');
        const int dp = dot == std::string::npos ? 0 : static_cast<int>(tok.size() - dot - 1);
        const double x = std::stod(tok);
        const double tol = 0.5 * std::pow(10.0, -dp) + 1e-12;
        const bool found = std::any_of(values.begin(), values.end(),
                                       [&](double v) { return std::fabs(v - x) <= tol; });
        CHECK_MESSAGE(found, "unmatched number ", tok, " in line: ", line);
        ++checked;
      }
    }
    CHECK(checked > 100);
  }
}

TEST_CASE("curve export") {
  const auto dir = temp_dir();
  const auto csv = (dir / "curve.csv").string();
  auto r = run({"curve", "--se1", "0.8", "--sp1", "0.95", "--se2", "0.9", "--sp2", "0.85", "--p", "0.5",
                "--out", csv});
  REQUIRE(r.code == 0);
  auto rows = read_csv(csv);
  CHECK(rows.size() == 101);
  CHECK(crossing(rows) == doctest::Approx(0.50).epsilon(0.01));

  r = run(with(with({"curve"}, kMalaria), {"--out", csv}));
  REQUIRE(r.code == 0);
  CHECK(r.out.find("0.1902") != std::string::npos);
  CHECK(std::fabs(crossing(read_csv(csv)) - 0.1902) <= 0.01);

  r = run({"curve", "--se1", "0.8", "--sp1", "0.95", "--se2", "0.9", "--sp2", "0.85", "--p", "0.5",
           "--grid", "0.3", "--out", csv});
  REQUIRE(r.code == 0);
  CHECK(read_csv(csv).size() == 1);

  r = run({"curve", "--se1", "0.3", "--sp1", "0.5", "--se2", "0.9", "--sp2", "0.85", "--p", "0.5",
           "--out", csv});
  CHECK(r.code == 1);
  r = run({"curve", "--se1", "0.8", "--out", csv});
  CHECK(r.code == 2);
}

TEST_CASE("plan subcommand") {
  auto r = run(with(with({"plan"}, kMalaria), {"--c", "0.9", "--precision", "0.10"}));
  REQUIRE(r.code == 0);
  CHECK(r.out.find("n = 435; add 135 subjects") != std::string::npos);
  r = run(with(with({"plan"}, kMalaria), {"--c", "0.9", "--precision", "0.13"}));
  REQUIRE(r.code == 0);
  CHECK(r.out.find("reached; n = 300") != std::string::npos);
  r = run(with(with({"plan"}, kMalaria), {"--c", "0.9"}));
  CHECK(r.code == 2);
}

TEST_CASE("simulate subcommand") {
  const auto dir = temp_dir();
  const auto batch = (dir / "batch.csv").string();
  {
    std::ofstream f(batch);
    f << "k0_1,k1_1,k0_2,k1_2,p,c,f,n,N\n0.21,0.14,0.81,0.72,0.5,0.1,0.5,500,2000\n";
  }
  const auto out1 = (dir / "cov1.csv").string(), out2 = (dir / "cov2.csv").string();
  auto r = run({"simulate", "--batch", batch, "--methods", "wald-diff", "--out", out1});
  REQUIRE(r.code == 0);
  r = run({"simulate", "--batch", batch, "--methods", "wald-diff", "--out", out2, "--jobs", "2"});
  REQUIRE(r.code == 0);
  CHECK(slurp(out1) == slurp(out2));
  CHECK(fs::exists(out1 + ".detail.csv"));

  std::istringstream in(slurp(out1));
  std::string header, line;
  std::getline(in, header);
  std::getline(in, line);
  CHECK(header == "method,target,n,N,cp,al,failed,redraws");
  std::vector<std::string> f;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
  REQUIRE(f.size() == 8);
  CHECK(f[0] == "wald-diff");
  CHECK(std::fabs(std::stod(f[4]) - 0.955) <= 0.015);

  {
    std::ofstream z(batch);
    z << "k0_1,k1_1,k0_2,k1_2,p,c,f,n,N\n0.21,0.14,0.81,0.72,0.5,0.1,0.5,500,0\n";
  }
  r = run({"simulate", "--batch", batch, "--out", out1});
  CHECK(r.code == 2);
  {
    std::ofstream z(batch);
    z << "k0_1,k1_1,k0_2,k1_2,p,c,f,n,N\n0.21,0.14,0.81\n";
  }
  r = run({"simulate", "--batch", batch, "--out", out1});
  CHECK(r.code == 1);
  CHECK(r.err.find("line 2") != std::string::npos);
}

TEST_CASE("report warnings") {
  AnalysisOptions opt;
  opt.c_values = {0.1, 0.5};

  auto has = [](const AnalysisReport& rep, const std::string& text) {
    for (const auto& w : rep.warnings) {
      if (w.find(text) != std::string::npos) return true;
    }
    return false;
  };

  const auto margins = build_report(PairedCounts{10, 0, 0, 5, 3, 0, 0, 20}, opt);
  CHECK(margins.corrected);
  CHECK(margins.analysed.s10 == 0.5);
  CHECK(has(margins, "zero column margins"));
  CHECK_FALSE(has(margins, "two or more zero margins"));
  CHECK(has(margins, "0.5 added to every cell"));

  AnalysisOptions no_fix = opt;
  no_fix.auto_correct = false;
  const auto advisable = build_report(PairedCounts{10, 0, 0, 5, 3, 0, 0, 20}, no_fix);
  CHECK_FALSE(advisable.corrected);
  CHECK(has(advisable, "two or more zero margins"));

  const auto eps = build_report(PairedCounts{10, 20, 20, 10, 5, 5, 5, 185}, opt);
  CHECK_FALSE(eps.corrected);
  CHECK(eps.accuracy.eps1 < 0);
  CHECK(has(eps, "eps1"));

  AnalysisOptions raw = opt;
  raw.auto_correct = false;
  const auto fieller = build_report(PairedCounts{5, 3, 2, 5, 2, 3, 3, 20}, raw);
  CHECK_FALSE(fieller.corrected);
  CHECK(has(fieller, "Fieller interval invalid at c = 0.1"));
  CHECK(render_human(fieller).find("fieller") != std::string::npos);

  AnalysisOptions plan = opt;
  plan.precision = 0.01;
  const auto close = build_report(PairedCounts{40, 10, 12, 38, 4, 6, 5, 185}, plan);
  CHECK(has(close, "c = 0.5: Wald interval for the ratio contains 1"));

  CHECK_THROWS_AS(build_report(PairedCounts{1, 0, 0, 0, 0, 0, 0, 0}, opt), Error);

  const auto clean = build_report(PairedCounts{41, 0, 40, 8, 5, 1, 24, 181}, AnalysisOptions{});
  CHECK(clean.warnings.empty());
  CHECK(clean.rows.size() == 10);
}
