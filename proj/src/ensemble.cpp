#include "fewnomial/ensemble.hpp"

#include "fewnomial/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace fewnomial {
namespace {

constexpr double kRootTolerance = 1e-8;
constexpr int kMaxAberth = 1000;

// Deflated sparse polynomial q(z) = sum_k a_k z^{e_k} with e_0 = 0, stored as
// log-magnitudes and phases so that terms spanning hundreds of decades can be
// combined after a common shift.
struct SparsePoly {
  std::vector<int> e;
  std::vector<double> loga;
  std::vector<double> arga;
  int degree() const { return e.back(); }
};

SparsePoly deflate(const FewnomialSample& s) {
  SparsePoly q;
  const int a = s.spectrum.front();
  for (std::size_t k = 0; k < s.spectrum.size(); ++k) {
    if (s.coeffs[k] == Complex(0.0)) continue;
    q.e.push_back(s.spectrum[k] - a);
    q.loga.push_back(std::log(std::abs(s.coeffs[k])));
    q.arga.push_back(std::arg(s.coeffs[k]));
  }
  return q;
}

// Terms tau_k = a_k z^{e_k} / scale with scale = max_k |a_k z^{e_k}|.
void terms(const SparsePoly& q, Complex z, std::vector<Complex>& tau) {
  const double lr = std::log(std::abs(z));
  const double th = std::arg(z);
  tau.resize(q.e.size());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < q.e.size(); ++k) top = std::max(top, q.loga[k] + q.e[k] * lr);
  for (std::size_t k = 0; k < q.e.size(); ++k)
    tau[k] = std::polar(std::exp(q.loga[k] + q.e[k] * lr - top), q.arga[k] + q.e[k] * th);
}

// Neumaier summation of complex terms.
Complex compensated_sum(const std::vector<Complex>& v) {
  auto add = [](double& s, double& c, double x) {
    const double t = s + x;
    c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  };
  double re = 0, rc = 0, im = 0, ic = 0;
  for (const Complex& x : v) {
    add(re, rc, x.real());
    add(im, ic, x.imag());
  }
  return {re + rc, im + ic};
}

// Newton correction p(z)/p'(z) = z * sum tau / sum e tau, and the relative
// residual |sum tau| / sum |tau|.
struct NewtonStep {
  Complex correction;
  double residual;
};

NewtonStep newton(const SparsePoly& q, Complex z, std::vector<Complex>& tau, bool compensated) {
  terms(q, z, tau);
  Complex p = compensated ? compensated_sum(tau) : Complex(0.0);
  Complex dp(0.0);
  double mag = 0.0;
  for (std::size_t k = 0; k < tau.size(); ++k) {
    if (!compensated) p += tau[k];
    dp += static_cast<double>(q.e[k]) * tau[k];
    mag += std::abs(tau[k]);
  }
  return {z * p / dp, std::abs(p) / mag};
}

// Initial points on circles given by the upper convex hull of
// (e_k, log|a_k|), one circle per hull edge with as many points as the edge
// spans in degree.
std::vector<Complex> initial_points(const SparsePoly& q) {
  std::vector<std::size_t> hull;
  for (std::size_t k = 0; k < q.e.size(); ++k) {
    while (hull.size() >= 2) {
      const std::size_t i = hull[hull.size() - 2], j = hull.back();
      const double cross = (q.e[j] - q.e[i]) * (q.loga[k] - q.loga[i]) -
                           (q.loga[j] - q.loga[i]) * (q.e[k] - q.e[i]);
      if (cross >= 0.0) hull.pop_back();
      else break;
    }
    hull.push_back(k);
  }
  std::vector<Complex> z;
  z.reserve(q.degree());
  for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
    const std::size_t i = hull[h], j = hull[h + 1];
    const int count = q.e[j] - q.e[i];
    const double radius = std::exp((q.loga[i] - q.loga[j]) / count);
    const double offset = 0.7 + 0.37 * static_cast<double>(h);
    for (int k = 0; k < count; ++k)
      z.push_back(std::polar(radius, offset + 2.0 * std::numbers::pi * k / count));
  }
  return z;
}

bool aberth(const SparsePoly& q, std::vector<Complex>& z, int& iterations) {
  const std::size_t d = z.size();
  std::vector<bool> frozen(d, false);
  std::vector<Complex> tau;
  std::size_t active = d;
  for (iterations = 0; iterations < kMaxAberth && active > 0; ++iterations) {
    for (std::size_t k = 0; k < d; ++k) {
      if (frozen[k]) continue;
      const NewtonStep ns = newton(q, z[k], tau, false);
      if (ns.residual <= 1e-13) {
        frozen[k] = true;
        --active;
        continue;
      }
      Complex repulsion(0.0);
      for (std::size_t l = 0; l < d; ++l)
        if (l != k) repulsion += 1.0 / (z[k] - z[l]);
      const Complex w = ns.correction / (1.0 - ns.correction * repulsion);
      if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) return false;
      z[k] -= w;
      if (std::abs(w) <= 1e-14 * std::abs(z[k])) {
        frozen[k] = true;
        --active;
      }
    }
  }
  return active == 0;
}

bool companion(const SparsePoly& q, std::vector<Complex>& z) {
  const int d = q.degree();
  // Rescale z = r w so that the extreme coefficients have equal magnitude.
  const double logr = (q.loga.front() - q.loga.back()) / d;
  std::vector<Complex> c(d + 1, Complex(0.0));
  for (std::size_t k = 0; k < q.e.size(); ++k)
    c[q.e[k]] = std::polar(std::exp(q.loga[k] + q.e[k] * logr - q.loga.back()), q.arga[k]);
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 1; i < d; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) C(i, d - 1) = -c[i] / c[d];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(C, false);
  if (solver.info() != Eigen::Success) return false;
  const double r = std::exp(logr);
  z.resize(d);
  for (int i = 0; i < d; ++i) z[i] = r * solver.eigenvalues()(i);
  return true;
}

void polish(const SparsePoly& q, std::vector<Complex>& z, double& worst) {
  std::vector<Complex> tau;
  worst = 0.0;
  for (Complex& root : z) {
    for (int step = 0; step < 2; ++step) {
      const NewtonStep ns = newton(q, root, tau, true);
      if (std::isfinite(ns.correction.real()) && std::isfinite(ns.correction.imag()))
        root -= ns.correction;
    }
    worst = std::max(worst, newton(q, root, tau, true).residual);
  }
}

double log_binomial(int a, int b) {
  return std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0);
}

void check_sizes(int N, int n) {
  if (N < 0) throw std::invalid_argument("degree N must be nonnegative");
  if (n < 1 || n > N + 1) throw std::invalid_argument("spectrum size n must lie in [1, N + 1]");
}

}  // namespace

double monomial_norm_sq(int N, int j) {
  if (j < 0 || j > N) throw std::invalid_argument("monomial_norm_sq: require 0 <= j <= N");
  return std::exp(std::lgamma(j + 1.0) + std::lgamma(N - j + 1.0) - std::lgamma(N + 2.0));
}

std::vector<int> sample_spectrum(int N, int n, CounterRng& rng) {
  check_sizes(N, n);
  std::set<int> chosen;
  const int total = N + 1;
  for (int j = total - n; j < total; ++j) {
    const int t = static_cast<int>(rng.below(static_cast<std::uint64_t>(j) + 1));
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  return {chosen.begin(), chosen.end()};
}

std::vector<int> sample_spectrum(int N, int n, std::uint64_t seed) {
  CounterRng rng(seed);
  return sample_spectrum(N, n, rng);
}

FewnomialSample sample_fewnomial(int N, int n, std::uint64_t seed) {
  CounterRng rng(seed);
  FewnomialSample s{N, sample_spectrum(N, n, rng), {}};
  s.coeffs.reserve(s.spectrum.size());
  for (int j : s.spectrum) s.coeffs.push_back(rng.complex_normal() / std::sqrt(monomial_norm_sq(N, j)));
  return s;
}

double relative_residual(const FewnomialSample& sample, Complex z) {
  const SparsePoly q = deflate(sample);
  std::vector<Complex> tau;
  return newton(q, z, tau, true).residual;
}

RootReport find_nonzero_roots(const FewnomialSample& sample) {
  if (sample.spectrum.size() != sample.coeffs.size())
    throw std::invalid_argument("find_nonzero_roots: spectrum and coefficients differ in length");
  RootReport report;
  if (sample.spectrum.size() < 2) return report;
  const SparsePoly q = deflate(sample);
  if (q.e.size() < 2 || q.e.front() != 0) return report;
  std::vector<Complex> z = initial_points(q);
  bool ok = aberth(q, z, report.iterations);
  double worst = 0.0;
  if (ok) polish(q, z, worst);
  if ((!ok || worst > kRootTolerance) && q.degree() <= 64) {
    report.used_companion = companion(q, z);
    if (report.used_companion) polish(q, z, worst);
    ok = report.used_companion;
  }
  if (!ok || !(worst <= kRootTolerance))
    throw RootFindingError("root finder did not reach residual 1e-8 (degree " +
                           std::to_string(q.degree()) + ")");
  report.roots = std::move(z);
  report.max_residual = worst;
  return report;
}

std::vector<Complex> nonzero_roots(const FewnomialSample& sample) {
  return find_nonzero_roots(sample).roots;
}

double RadialHistogram::total_mass() const {
  return accepted == 0 ? 0.0 : static_cast<double>(total_roots) / (static_cast<double>(accepted) * N);
}

double RadialHistogram::mean_span_over_N() const {
  return accepted == 0 ? 0.0 : static_cast<double>(span_sum) / (static_cast<double>(accepted) * N);
}

double RadialHistogram::span_std_error_over_N() const {
  if (accepted < 2) return 0.0;
  const double a = static_cast<double>(accepted);
  const double mean = static_cast<double>(span_sum) / a;
  const double var = std::max(0.0, (span_sq_sum - a * mean * mean) / (a - 1.0));
  return std::sqrt(var / a) / N;
}

RadialHistogram empirical_radial(int N, int n, std::uint64_t samples, const HistogramSpec& spec,
                                 std::uint64_t seed, unsigned workers) {
  check_sizes(N, n);
  if (N < 1) throw std::invalid_argument("empirical_radial: degree must be positive");
  if (samples == 0) throw std::invalid_argument("empirical_radial: samples must be positive");
  if (!(spec.rho_min < spec.rho_max) || spec.bins < 1)
    throw std::invalid_argument("empirical_radial: invalid bin specification");
  RadialHistogram hist;
  hist.N = N;
  hist.n = n;
  hist.requested = samples;
  const double width = (spec.rho_max - spec.rho_min) / spec.bins;
  for (int b = 0; b <= spec.bins; ++b) hist.edges.push_back(spec.rho_min + b * width);

  struct Outcome {
    bool ok = false;
    int span = 0;
    double residual = 0.0;
    std::vector<double> rho;
  };
  std::vector<Outcome> outcomes(samples);
  if (workers == 0) workers = default_workers();
  parallel_for(samples, workers, [&](std::size_t i) {
    const FewnomialSample s = sample_fewnomial(N, n, CounterRng::derive(seed, i));
    Outcome& out = outcomes[i];
    try {
      const RootReport r = find_nonzero_roots(s);
      out.rho.reserve(r.roots.size());
      for (const Complex& z : r.roots) out.rho.push_back(2.0 * std::log(std::abs(z)));
      out.span = s.spectrum.back() - s.spectrum.front();
      out.residual = r.max_residual;
      out.ok = true;
    } catch (const RootFindingError&) {
      out.ok = false;
    }
  });

  hist.counts.assign(spec.bins, 0);
  std::vector<double> count_sq(spec.bins, 0.0);
  std::vector<std::uint64_t> local(spec.bins);
  for (const Outcome& out : outcomes) {
    if (!out.ok) {
      ++hist.failures;
      continue;
    }
    ++hist.accepted;
    hist.span_sum += out.span;
    hist.span_sq_sum += static_cast<double>(out.span) * out.span;
    hist.total_roots += out.rho.size();
    hist.max_residual = std::max(hist.max_residual, out.residual);
    std::fill(local.begin(), local.end(), 0);
    for (double r : out.rho) {
      if (!(r >= spec.rho_min && r < spec.rho_max)) continue;
      ++local[std::min(spec.bins - 1, static_cast<int>((r - spec.rho_min) / width))];
    }
    for (int b = 0; b < spec.bins; ++b) {
      hist.counts[b] += local[b];
      count_sq[b] += static_cast<double>(local[b]) * local[b];
    }
  }
  const double a = static_cast<double>(hist.accepted);
  const double scale = hist.accepted == 0 ? 0.0 : 1.0 / (a * N * width);
  for (int b = 0; b < spec.bins; ++b) {
    const double c = static_cast<double>(hist.counts[b]);
    hist.density.push_back(c * scale);
    hist.poisson_error.push_back(std::sqrt(c) * scale);
    // Var(mean per-sample count) = (E[c^2] - E[c]^2) / (a - 1) per sample.
    const double var = a > 1.0 ? std::max(0.0, (count_sq[b] - c * c / a) / (a - 1.0)) : 0.0;
    hist.std_error.push_back(std::sqrt(var * a) * scale);
  }
  return hist;
}

double expected_span_exact(int N, int n) {
  check_sizes(N, n);
  if (n == 1) return 0.0;
  // Subsets with min a and max a + d number C(d - 1, n - 2); they depend on
  // d only, with N + 1 - d choices of a.
  const double log_total = log_binomial(N + 1, n);
  double sum = 0.0;
  for (int d = n - 1; d <= N; ++d)
    sum += d * (N + 1.0 - d) * std::exp(log_binomial(d - 1, n - 2) - log_total);
  return sum;
}

double expected_span_enumerate(int N, int n) {
  check_sizes(N, n);
  if (log_binomial(N + 1, n) > std::log(1e7) + 1e-9)
    throw std::invalid_argument("expected_span_enumerate: more than 1e7 subsets");
  std::vector<int> idx(n);
  for (int k = 0; k < n; ++k) idx[k] = k;
  double total = 0.0;
  std::uint64_t count = 0;
  while (true) {
    total += idx.back() - idx.front();
    ++count;
    int k = n - 1;
    while (k >= 0 && idx[k] == N + 1 - n + k) --k;
    if (k < 0) break;
    ++idx[k];
    for (int j = k + 1; j < n; ++j) idx[j] = idx[j - 1] + 1;
  }
  return total / static_cast<double>(count);
}

McEstimate expected_span_mc(int N, int n, std::uint64_t samples, std::uint64_t seed) {
  check_sizes(N, n);
  if (samples == 0) throw std::invalid_argument("expected_span_mc: samples must be positive");
  double sum = 0.0, sq = 0.0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    CounterRng rng(CounterRng::derive(seed, i));
    const auto s = sample_spectrum(N, n, rng);
    const double span = s.back() - s.front();
    sum += span;
    sq += span * span;
  }
  const double m = sum / samples;
  const double var = samples > 1 ? std::max(0.0, (sq - samples * m * m) / (samples - 1.0)) : 0.0;
  return {m, std::sqrt(var / samples), samples};
}

double expected_span_formula(int N, int n) {
  return N * (n - 1.0) / (n + 1.0) + 2.0 * n / (n + 1.0);
}

double expected_span(int N, int n, SpanMode mode, std::uint64_t samples, std::uint64_t seed) {
  switch (mode) {
    case SpanMode::Exact: return expected_span_exact(N, n);
    case SpanMode::Enumerate: return expected_span_enumerate(N, n);
    case SpanMode::MonteCarlo: return expected_span_mc(N, n, samples, seed).value;
  }
  throw std::invalid_argument("expected_span: unknown mode");
}

}  // namespace fewnomial
