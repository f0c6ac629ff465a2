#include "commands.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace fewnomial::cli;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "fewnomial");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<double>> parse_csv(const std::string& text, std::string* header = nullptr) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (header) *header = line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(cell.empty() ? NAN : std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

int system_exit(const std::string& args) {
  const std::string cmd = std::string(FEWNOMIAL_EXE) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3, -2.5e-300, 6.02214076e23}) CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("density table: rows, symmetry, mass and the reference column") {
  const Outcome o = invoke({"density", "--m", "1", "--n", "4", "--rho-min", "-6", "--rho-max", "6", "--steps", "241"});
  REQUIRE(o.code == kOk);
  std::string header;
  const auto rows = parse_csv(o.out, &header);
  CHECK(header == "rho,F,dF,d2F,density,fs_density");
  REQUIRE(rows.size() == 241);
  double trap = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i][4] == doctest::Approx(rows[240 - i][4]).epsilon(1e-8).scale(1e-12));
    if (i > 0) trap += 0.5 * 0.05 * (rows[i][4] + rows[i - 1][4]);
  }
  CHECK(trap == doctest::Approx(0.6).epsilon(1e-3));
  CHECK(rows[120][0] == 0.0);
  CHECK(rows[120][5] == 0.25);
}

TEST_CASE("density table for m = 2 has the Hessian columns") {
  const Outcome o = invoke({"density", "--m", "2", "--n", "3", "--steps", "2", "--order", "1"});
  REQUIRE(o.code == kOk);
  std::string header;
  const auto rows = parse_csv(o.out, &header);
  CHECK(header == "rho_1,rho_2,F,dF_1,dF_2,d2F_11,d2F_12,d2F_21,d2F_22,density,fs_density");
  CHECK(rows.size() == 4);
  for (const auto& r : rows) {
    CHECK(r.size() == 11);
    CHECK(r[6] == doctest::Approx(r[7]).epsilon(1e-8));
  }
}

TEST_CASE("dist output") {
  const Outcome o = invoke({"dist", "--rho", "0", "--steps", "11"});
  REQUIRE(o.code == kOk);
  std::string header;
  const auto rows = parse_csv(o.out, &header);
  CHECK(header == "t,D,D_t,D_rho_1");
  REQUIRE(rows.size() == 11);
  CHECK(rows.front()[1] == 0.0);
  CHECK(std::isinf(rows.front()[2]));
  CHECK(rows.back()[1] == 1.0);
  const Outcome mc = invoke({"dist", "--rho", "1,-1", "--steps", "3", "--mc-samples", "10000"});
  REQUIRE(mc.code == kOk);
  const auto mrows = parse_csv(mc.out, &header);
  CHECK(header == "t,D,D_t,D_rho_1,D_rho_2,mc,mc_stderr");
  CHECK(std::abs(mrows[1][1] - mrows[1][5]) < 4 * mrows[1][6]);
}

TEST_CASE("figure curves: ordering, reference bound and normalization") {
  const Outcome before = invoke({"figure", "--which", "before-normalization"});
  REQUIRE(before.code == kOk);
  std::string header;
  const auto rows = parse_csv(before.out, &header);
  CHECK(header == "rho,n2,n4,n8,n32,n128,fs");
  REQUIRE(rows.size() == 241);
  for (const auto& r : rows) {
    for (int k = 1; k < 5; ++k) CHECK(r[k] <= r[k + 1] + 1e-6);
    for (int k = 1; k <= 5; ++k) CHECK(r[k] <= r[6] + 1e-6);
  }
  const Outcome quotient = invoke({"figure", "--which", "quotient", "--steps", "25"});
  for (const auto& r : parse_csv(quotient.out))
    for (int k = 1; k <= 5; ++k) CHECK(r[k] <= 1.0 + 1e-6);
  const Outcome after = invoke({"figure", "--which", "after-normalization"});
  const auto arows = parse_csv(after.out);
  for (int k = 1; k <= 5; ++k) {
    double trap = 0.0;
    for (std::size_t i = 1; i < arows.size(); ++i) trap += 0.05 * (arows[i][k] + arows[i - 1][k]);
    CHECK(trap == doctest::Approx(1.0).epsilon(2e-3));
  }
}

TEST_CASE("figure writes a self-contained SVG") {
  const std::string path = "test_cli_figure.svg";
  const Outcome o = invoke({"figure", "--steps", "11", "--svg", path});
  REQUIRE(o.code == kOk);
  std::ifstream in(path);
  std::stringstream svg;
  svg << in.rdbuf();
  const std::string s = svg.str();
  CHECK(s.rfind("<svg", 0) == 0);
  CHECK(s.find("polyline") != std::string::npos);
  CHECK(s.find("n=128") != std::string::npos);
  CHECK(s.find("href") == std::string::npos);
  std::remove(path.c_str());
  const Outcome direct = invoke({"figure", "--steps", "11", "--format", "svg"});
  CHECK(direct.out == s);
}

TEST_CASE("mc-zeros output is byte-identical for a fixed seed") {
  const std::vector<std::string> args{"mc-zeros", "--N", "40", "--n", "3", "--samples", "300", "--seed", "11"};
  const Outcome a = invoke(args), b = invoke(args);
  REQUIRE(a.code == kOk);
  CHECK(a.out == b.out);
  std::string header;
  const auto rows = parse_csv(a.out, &header);
  CHECK(header == "rho_lo,rho_hi,empirical,stderr,analytic");
  CHECK(rows.size() == 24);
  CHECK(a.err.find("total mass") != std::string::npos);
  const Outcome c = invoke({"mc-zeros", "--N", "40", "--n", "3", "--samples", "300", "--seed", "12"});
  CHECK(c.out != a.out);
}

TEST_CASE("span reports all three values side by side") {
  const Outcome o = invoke({"span", "--N", "2", "--n", "2", "--samples", "20000"});
  REQUIRE(o.code == kOk);
  std::string header;
  const auto rows = parse_csv(o.out, &header);
  CHECK(header == "N,n,enumeration,exact,mc,mc_stderr,formula,exact_over_N");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0][2] == doctest::Approx(4.0 / 3));
  CHECK(rows[0][6] == doctest::Approx(2.0));
}

TEST_CASE("verify: suite filter, pass and injected failure") {
  const Outcome o = invoke({"verify", "--suite", "stilde"});
  CHECK(o.code == kOk);
  std::istringstream lines(o.out);
  std::string line;
  int checks = 0;
  while (std::getline(lines, line))
    if (line.rfind("PASS", 0) == 0 || line.rfind("FAIL", 0) == 0) {
      ++checks;
      CHECK(line.find("stilde:") != std::string::npos);
    }
  CHECK(checks > 0);
  CHECK(o.out.find("ALL PASS") != std::string::npos);

  const Outcome bad = invoke({"verify", "--suite", "simplex", "--perturb"});
  CHECK(bad.code == kFailure);
  CHECK(bad.out.find("FAIL simplex: jacobian matches central differences") != std::string::npos);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(invoke({}).code == kUsage);
  CHECK(invoke({"frobnicate"}).code == kUsage);
  CHECK(invoke({"density", "--steps", "1"}).code == kUsage);
  CHECK(invoke({"density", "--rho-min", "2", "--rho-max", "1"}).code == kUsage);
  CHECK(invoke({"density", "--n", "0"}).code == kUsage);
  CHECK(invoke({"figure", "--which", "sideways"}).code == kUsage);
  CHECK(invoke({"verify", "--suite", "nonexistent"}).code == kUsage);
  CHECK(invoke({"mc-zeros", "--m", "2"}).code == kUsage);
  CHECK(invoke({"density", "--bogus-flag"}).code == kUsage);
}

TEST_CASE("options can come from a key=value file") {
  const std::string path = "test_cli_config.ini";
  {
    std::ofstream cfg(path);
    cfg << "n=3\nsteps=5\nrho-min=-1\nrho-max=1\n";
  }
  const Outcome a = invoke({"--config", path, "density"});
  const Outcome b = invoke({"density", "--n", "3", "--steps", "5", "--rho-min", "-1", "--rho-max", "1"});
  std::remove(path.c_str());
  REQUIRE(a.code == kOk);
  CHECK(a.out == b.out);
}

TEST_CASE("the installed executable reports stable exit codes") {
  CHECK(system_exit("span --N 3 --n 2") == 0);
  CHECK(system_exit("verify --suite stilde") == 0);
  CHECK(system_exit("verify --suite simplex --perturb") == 1);
  CHECK(system_exit("no-such-command") == 2);
  CHECK(system_exit("--help") == 0);
}
