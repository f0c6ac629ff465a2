#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fewnomial::cli {

enum class Command { Density, Dist, Figure, Verify, McZeros, Span };
enum class Format { Csv, Svg };

/// Everything a subcommand may read. Optional fields fall back to
/// command-specific defaults.
struct RunConfig {
  Command command = Command::Density;
  int m = 1;
  std::vector<int> n{4};
  int N = 200;
  std::uint64_t samples = 2000;
  std::uint64_t seed = 7;
  std::optional<double> rho_min, rho_max;
  std::optional<int> steps;
  std::vector<double> rho;  // dist: the point rho
  int order = 0;
  std::string output;       // empty: stdout
  std::string svg;          // figure: optional SVG path
  Format format = Format::Csv;  // figure: what goes to the output
  std::string which = "before-normalization";
  std::vector<std::string> suites;
  bool perturb = false;
  bool check = false;
  int bins = 24;
  std::uint64_t mc_samples = 0;  // dist: add a Monte Carlo column when > 0
  unsigned threads = 0;
};

/// Exit codes.
constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

/// Raised for invalid option combinations; mapped to kUsage.
struct UsageError {
  std::string message;
};

int cmd_density(const RunConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_dist(const RunConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_figure(const RunConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_mc_zeros(const RunConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_span(const RunConfig& cfg, std::ostream& out, std::ostream& log);

/// Parses argv and dispatches; returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double v);

}  // namespace fewnomial::cli
