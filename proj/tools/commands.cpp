#include "commands.hpp"

#include "fewnomial/density.hpp"
#include "fewnomial/distribution.hpp"
#include "fewnomial/rng.hpp"
#include "fewnomial/ensemble.hpp"
#include "fewnomial/parallel.hpp"
#include "fewnomial/verify.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

namespace fewnomial::cli {
namespace {

unsigned workers(const RunConfig& cfg) { return cfg.threads > 0 ? cfg.threads : default_workers(); }

std::vector<double> linspace(double lo, double hi, int steps) {
  if (steps < 2) throw UsageError{"--steps must be at least 2"};
  if (!(lo < hi)) throw UsageError{"--rho-min must be below --rho-max"};
  std::vector<double> v(steps);
  for (int i = 0; i < steps; ++i) v[i] = lo + (hi - lo) * i / (steps - 1);
  return v;
}

// Writes to the configured file, or to `fallback` when no path was given.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open '" + path + "' for writing");
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }
  void close() {
    if (file_.is_open()) {
      file_.close();
      if (!file_) throw std::runtime_error("write failed");
    }
  }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

void write_row(std::ostream& os, const std::vector<double>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
  os << '\n';
}

int single_n(const RunConfig& cfg) {
  if (cfg.n.size() != 1) throw UsageError{"this command takes a single --n"};
  const int n = cfg.n.front();
  if (n < 1 || n > kMaxN) throw UsageError{"--n must lie in [1, 512]"};
  return n;
}

// ----------------------------------------------------------------- figure

const std::vector<int> kFigureNs{2, 4, 8, 32, 128};

std::string svg_plot(const std::string& title, const std::vector<double>& x,
                     const std::vector<std::pair<std::string, std::vector<double>>>& series) {
  const double W = 800, H = 500, L = 70, R = 150, T = 40, B = 50;
  double ymin = 0.0, ymax = 0.0;
  for (const auto& [name, ys] : series)
    for (double y : ys) ymax = std::max(ymax, y);
  if (ymax <= ymin) ymax = 1.0;
  ymax *= 1.05;
  const double x0 = x.front(), x1 = x.back();
  auto px = [&](double v) { return L + (v - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double v) { return H - B - (v - ymin) / (ymax - ymin) * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#333333"};
  std::ostringstream s;
  s.precision(6);
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
  s << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 6; ++i) {
    const double v = x0 + (x1 - x0) * i / 6.0;
    s << "<line x1=\"" << px(v) << "\" y1=\"" << H - B << "\" x2=\"" << px(v) << "\" y2=\"" << H - B + 5
      << "\" stroke=\"black\"/><text x=\"" << px(v) << "\" y=\"" << H - B + 20 << "\" text-anchor=\"middle\">" << v
      << "</text>\n";
    const double w = ymin + (ymax - ymin) * i / 6.0;
    s << "<line x1=\"" << L - 5 << "\" y1=\"" << py(w) << "\" x2=\"" << L << "\" y2=\"" << py(w)
      << "\" stroke=\"black\"/><text x=\"" << L - 8 << "\" y=\"" << py(w) + 4 << "\" text-anchor=\"end\">" << w
      << "</text>\n";
  }
  s << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">rho</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    s << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << colors[k % 6] << "\""
      << (series[k].first == "fs" ? " stroke-dasharray=\"6,4\"" : "") << " points=\"";
    for (std::size_t i = 0; i < x.size(); ++i) s << px(x[i]) << ',' << py(series[k].second[i]) << ' ';
    s << "\"/>\n";
    const double ly = T + 20 + 20 * k;
    s << "<line x1=\"" << W - R + 15 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 45 << "\" y2=\"" << ly
      << "\" stroke=\"" << colors[k % 6] << "\" stroke-width=\"2\"/><text x=\"" << W - R + 52 << "\" y=\"" << ly + 4
      << "\">" << series[k].first << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int cmd_density(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  const int n = single_n(cfg);
  if (n < 2) throw UsageError{"density needs --n >= 2"};
  if (cfg.m < 1 || cfg.m > 3) throw UsageError{"density supports --m 1, 2 or 3"};
  const auto axis = linspace(cfg.rho_min.value_or(-6.0), cfg.rho_max.value_or(6.0), cfg.steps.value_or(241));
  const int m = cfg.m;
  std::vector<RadialPoint> grid;
  std::vector<int> idx(m, 0);
  while (true) {
    Vector r(m);
    for (int p = 0; p < m; ++p) r(p) = axis[idx[p]];
    grid.emplace_back(r);
    int p = m - 1;
    while (p >= 0 && ++idx[p] == static_cast<int>(axis.size())) idx[p--] = 0;
    if (p < 0) break;
  }
  DensityOptions opt;
  opt.order = cfg.order;
  const DensityTable table = density_table(n, grid, opt, workers(cfg));

  Sink sink(cfg.output, out);
  std::ostream& os = *sink;
  if (m == 1) {
    os << "rho,F,dF,d2F,density,fs_density\n";
  } else {
    for (int p = 1; p <= m; ++p) os << "rho_" << p << ',';
    os << 'F';
    for (int p = 1; p <= m; ++p) os << ",dF_" << p;
    for (int p = 1; p <= m; ++p)
      for (int q = 1; q <= m; ++q) os << ",d2F_" << p << q;
    os << ",density,fs_density\n";
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::vector<double> row(grid[i].values().data(), grid[i].values().data() + m);
    row.push_back(table.F[i]);
    for (int p = 0; p < m; ++p) row.push_back(table.grad[i](p));
    for (int p = 0; p < m; ++p)
      for (int q = 0; q < m; ++q) row.push_back(table.hess[i](p, q));
    row.push_back(table.density[i]);
    row.push_back(table.fs_density[i]);
    write_row(os, row);
  }
  sink.close();
  log << "density: " << grid.size() << " rows, n=" << n << ", m=" << m << '\n';
  return kOk;
}

int cmd_dist(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  Vector r = Vector::Zero(cfg.m);
  if (!cfg.rho.empty()) r = Eigen::Map<const Vector>(cfg.rho.data(), cfg.rho.size());
  if (r.size() < 1) throw UsageError{"dist needs --m >= 1"};
  const RadialPoint rho(r);
  const FacetModel model(rho, cfg.order);
  const auto ts = linspace(0.0, model.b_max(), cfg.steps.value_or(51));
  const int m = rho.dim();
  Sink sink(cfg.output, out);
  std::ostream& os = *sink;
  os << "t,D,D_t";
  for (int p = 1; p <= m; ++p) os << ",D_rho_" << p;
  if (cfg.mc_samples > 0) os << ",mc,mc_stderr";
  os << '\n';
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const DistEval e = model.eval(ts[i]);
    std::vector<double> row{e.t, e.value, e.dt};
    for (int p = 0; p < m; ++p) row.push_back(e.drho(p));
    if (cfg.mc_samples > 0) {
      const McEstimate mc = D_mc_oracle(ts[i], rho, cfg.mc_samples, CounterRng::derive(cfg.seed, i), workers(cfg));
      row.push_back(mc.value);
      row.push_back(mc.std_error);
    }
    write_row(os, row);
  }
  sink.close();
  log << "dist: " << ts.size() << " rows, b_max=" << format_double(model.b_max()) << '\n';
  return kOk;
}

int cmd_figure(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  if (cfg.m != 1) throw UsageError{"figure is defined for --m 1"};
  enum { Before, Quotient, After } kind;
  if (cfg.which == "before-normalization") kind = Before;
  else if (cfg.which == "quotient") kind = Quotient;
  else if (cfg.which == "after-normalization") kind = After;
  else throw UsageError{"--which must be before-normalization, quotient or after-normalization"};
  const auto grid = linspace(cfg.rho_min.value_or(-12.0), cfg.rho_max.value_or(12.0), cfg.steps.value_or(241));

  std::vector<std::pair<std::string, std::vector<double>>> series;
  for (int n : kFigureNs) series.emplace_back("n=" + std::to_string(n), std::vector<double>(grid.size()));
  series.emplace_back("fs", std::vector<double>(grid.size()));
  DensityOptions opt;
  parallel_for(grid.size(), workers(cfg), [&](std::size_t i) {
    const double fs = fs_density(grid[i]);
    for (std::size_t k = 0; k < kFigureNs.size(); ++k) {
      const int n = kFigureNs[k];
      double v = radial_density(n, grid[i], opt);
      if (kind == Quotient) v /= fs;
      if (kind == After) v /= expected_mass(n).value();
      series[k].second[i] = v;
    }
    series.back().second[i] = kind == Quotient ? 1.0 : fs;
  });

  const std::string title = kind == Before   ? "Density functions d2F_n/drho2"
                            : kind == Quotient ? "Quotient of density functions by the Fubini-Study density"
                                               : "Normalized density functions";
  Sink sink(cfg.output, out);
  std::ostream& os = *sink;
  if (cfg.format == Format::Svg) {
    os << svg_plot(title, grid, series);
  } else {
    os << "rho";
    for (int n : kFigureNs) os << ",n" << n;
    os << ",fs\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      std::vector<double> row{grid[i]};
      for (const auto& s : series) row.push_back(s.second[i]);
      write_row(os, row);
    }
  }
  sink.close();
  if (!cfg.svg.empty()) {
    std::ofstream svg(cfg.svg);
    if (!svg) throw std::runtime_error("cannot open '" + cfg.svg + "' for writing");
    svg << svg_plot(title, grid, series);
    if (!svg) throw std::runtime_error("write failed");
  }
  log << "figure " << cfg.which << ": " << grid.size() << " points\n";
  return kOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  VerifyOptions opt;
  opt.suites = cfg.suites;
  opt.perturb = cfg.perturb;
  opt.workers = workers(cfg);
  opt.seed = cfg.seed;
  int failed = 0, total = 0;
  std::vector<CheckResult> results;
  try {
    results = run_verify(opt, [&](const CheckResult& r) {
      ++total;
      if (!r.pass) ++failed;
      out << (r.pass ? "PASS " : "FAIL ") << r.suite << ": " << r.name << "  measured=" << format_double(r.measured)
          << " tolerance=" << format_double(r.tolerance);
      if (!r.note.empty()) out << "  (" << r.note << ")";
      out << '\n' << std::flush;
    });
  } catch (const std::invalid_argument& e) {
    throw UsageError{e.what()};
  }
  out << (failed == 0 ? "ALL PASS" : "FAILURES") << ": " << total - failed << "/" << total << " checks passed\n";
  log << "verify: " << failed << " failing checks\n";
  return failed == 0 ? kOk : kFailure;
}

int cmd_mc_zeros(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  if (cfg.m != 1) throw UsageError{"mc-zeros is defined for --m 1"};
  const int n = single_n(cfg);
  if (cfg.N < 1 || n > cfg.N + 1) throw UsageError{"mc-zeros needs N >= 1 and n <= N + 1"};
  if (cfg.samples < 1) throw UsageError{"--samples must be positive"};
  if (cfg.bins < 1) throw UsageError{"--bins must be positive"};
  const HistogramSpec spec{cfg.rho_min.value_or(-6.0), cfg.rho_max.value_or(6.0), cfg.bins};
  if (!(spec.rho_min < spec.rho_max)) throw UsageError{"--rho-min must be below --rho-max"};
  const RadialHistogram hist = empirical_radial(cfg.N, n, cfg.samples, spec, cfg.seed, workers(cfg));
  const double failure_rate = static_cast<double>(hist.failures) / hist.requested;
  if (failure_rate > 1e-3) {
    log << "mc-zeros: aborting, root finder failed on " << hist.failures << " of " << hist.requested
        << " samples (limit 0.1%)\n";
    return kFailure;
  }
  const double width = (spec.rho_max - spec.rho_min) / spec.bins;
  const double scale = 1.0 / (static_cast<double>(hist.accepted) * hist.N * width);
  Sink sink(cfg.output, out);
  std::ostream& os = *sink;
  os << "rho_lo,rho_hi,empirical,stderr,analytic\n";
  int within = 0;
  std::ostringstream bins;
  for (int b = 0; b < spec.bins; ++b) {
    const double lo = hist.edges[b], hi = hist.edges[b + 1];
    // Bin average of f_n from the exact antiderivative F_n'.
    const double analytic = (F_grad(n, {hi})(0) - F_grad(n, {lo})(0)) / width;
    write_row(os, {lo, hi, hist.density[b], hist.std_error[b], analytic});
    const double sigma = std::max(hist.std_error[b], std::sqrt(std::max(analytic, 0.0) / scale) * scale);
    const double z = sigma > 0 ? (hist.density[b] - analytic) / sigma : 0.0;
    if (std::abs(z) <= 3.0) ++within;
    bins << "  [" << lo << ", " << hi << ")  z = " << z << '\n';
  }
  sink.close();
  const double exact = expected_span_exact(cfg.N, n) / cfg.N;
  const double zmass = (hist.total_mass() - exact) / hist.span_std_error_over_N();
  const double frac = static_cast<double>(within) / spec.bins;
  log << "mc-zeros: N=" << cfg.N << " n=" << n << " samples=" << hist.requested << " accepted=" << hist.accepted
      << " failures=" << hist.failures << " max residual=" << hist.max_residual << '\n'
      << "total mass " << format_double(hist.total_mass()) << " vs E[span]/N " << format_double(exact)
      << " (z = " << zmass << ")\n"
      << "bins within 3 sigma: " << within << "/" << spec.bins << " (" << 100.0 * frac << "%)\n"
      << bins.str();
  if (cfg.check && (frac < 0.95 || std::abs(zmass) > 3.0)) return kFailure;
  return kOk;
}

int cmd_span(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  const int n = single_n(cfg);
  if (cfg.N < 0 || n > cfg.N + 1) throw UsageError{"span needs n <= N + 1"};
  const double exact = expected_span_exact(cfg.N, n);
  std::string enumerated = "";
  try {
    enumerated = format_double(expected_span_enumerate(cfg.N, n));
  } catch (const std::invalid_argument&) {
    log << "span: more than 1e7 subsets, enumeration column left empty\n";
  }
  const McEstimate mc = expected_span_mc(cfg.N, n, std::max<std::uint64_t>(cfg.samples, 1), cfg.seed);
  Sink sink(cfg.output, out);
  std::ostream& os = *sink;
  os << "N,n,enumeration,exact,mc,mc_stderr,formula,exact_over_N\n";
  os << cfg.N << ',' << n << ',' << enumerated << ',' << format_double(exact) << ',' << format_double(mc.value) << ','
     << format_double(mc.std_error) << ',' << format_double(expected_span_formula(cfg.N, n)) << ','
     << format_double(cfg.N > 0 ? exact / cfg.N : 0.0) << '\n';
  sink.close();
  return kOk;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Zero densities of random fewnomials: potentials, distributions and Monte Carlo checks"};
  app.set_config("--config", "", "Read options from a key=value file");
  app.require_subcommand(1);
  RunConfig cfg;
  double rho_min = 0, rho_max = 0;
  int steps = 0;

  app.add_option("--m", cfg.m, "Dimension of the torus (C*)^m")->check(CLI::Range(1, 8));
  app.add_option("--n", cfg.n, "Number of terms; figure ignores this")->delimiter(',');
  app.add_option("--N", cfg.N, "Degree for Monte Carlo zeros and span statistics");
  app.add_option("--samples", cfg.samples, "Monte Carlo sample count");
  auto* oseed = app.add_option("--seed", cfg.seed, "Seed for every random stream");
  auto* omin = app.add_option("--rho-min", rho_min, "Lower end of the rho grid");
  auto* omax = app.add_option("--rho-max", rho_max, "Upper end of the rho grid");
  auto* osteps = app.add_option("--steps", steps, "Grid points (per axis)");
  app.add_option("--rho", cfg.rho, "Point rho for dist (comma separated)")->delimiter(',');
  app.add_option("--order", cfg.order, "Facet subdivisions per edge (0 = default)")->check(CLI::NonNegativeNumber);
  app.add_option("--output,-o", cfg.output, "Output file (default stdout)");
  app.add_option("--svg", cfg.svg, "figure: also write an SVG plot here");
  std::string format = "csv";
  app.add_option("--format", format, "figure: write csv or svg to the output")->check(CLI::IsMember({"csv", "svg"}));
  app.add_option("--which", cfg.which, "figure: before-normalization | quotient | after-normalization");
  app.add_option("--suite", cfg.suites, "verify: run only these suites");
  app.add_flag("--perturb", cfg.perturb, "verify: shift the analytic path to exercise failure reporting");
  app.add_flag("--check", cfg.check, "mc-zeros: exit 1 when the comparison misses its thresholds");
  app.add_option("--bins", cfg.bins, "mc-zeros: histogram bins");
  app.add_option("--mc-samples", cfg.mc_samples, "dist: add a Monte Carlo column with this many samples");
  app.add_option("--threads", cfg.threads, "Worker threads (default FEWNOMIAL_THREADS or all cores)");

  struct Sub {
    const char* name;
    const char* help;
    Command cmd;
  };
  const Sub subs[] = {{"density", "Table of F_n, its derivatives and the zero density", Command::Density},
                      {"dist", "Distribution function D(t, rho) and its derivatives", Command::Dist},
                      {"figure", "Density curves for n = 2, 4, 8, 32, 128 with the Fubini-Study reference", Command::Figure},
                      {"verify", "Run the invariant suites", Command::Verify},
                      {"mc-zeros", "Histogram of zeros of random fewnomials against the limit density", Command::McZeros},
                      {"span", "Expected span by enumeration, Monte Carlo and closed form", Command::Span}};
  for (const Sub& s : subs) {
    auto* sc = app.add_subcommand(s.name, s.help);
    sc->fallthrough();
    const Command c = s.cmd;
    sc->callback([&cfg, c] { cfg.command = c; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }
  if (omin->count()) cfg.rho_min = rho_min;
  if (omax->count()) cfg.rho_max = rho_max;
  if (osteps->count()) cfg.steps = steps;
  cfg.format = format == "svg" ? Format::Svg : Format::Csv;
  if (cfg.command == Command::Verify && !oseed->count()) cfg.seed = VerifyOptions{}.seed;

  try {
    switch (cfg.command) {
      case Command::Density: return cmd_density(cfg, out, err);
      case Command::Dist: return cmd_dist(cfg, out, err);
      case Command::Figure: return cmd_figure(cfg, out, err);
      case Command::Verify: return cmd_verify(cfg, out, err);
      case Command::McZeros: return cmd_mc_zeros(cfg, out, err);
      case Command::Span: return cmd_span(cfg, out, err);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.message << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace fewnomial::cli
