#pragma once

#include "fewnomial/distribution.hpp"
#include "fewnomial/rng.hpp"

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace fewnomial {

using Complex = std::complex<double>;

/// ||z^j||^2 = j! (N - j)! / (N + 1)! for the degree-N Fubini-Study inner
/// product on C.
double monomial_norm_sq(int N, int j);

/// Uniform n-subset of {0, ..., N}, sorted (Floyd's algorithm).
std::vector<int> sample_spectrum(int N, int n, CounterRng& rng);
std::vector<int> sample_spectrum(int N, int n, std::uint64_t seed);

/// Random n-nomial of degree <= N: sum over the spectrum of c_j z^j / ||z^j||
/// with independent standard complex Gaussian c_j.
struct FewnomialSample {
  int N;
  std::vector<int> spectrum;
  std::vector<Complex> coeffs;  // coeffs[k] multiplies z^spectrum[k]
};

FewnomialSample sample_fewnomial(int N, int n, std::uint64_t seed);

class RootFindingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RootReport {
  std::vector<Complex> roots;
  double max_residual = 0.0;  // max over roots of |p(z)| / sum |a_j z^j|
  int iterations = 0;
  bool used_companion = false;
};

/// Nonzero roots with diagnostics; throws RootFindingError when a root
/// cannot be certified to residual 1e-8.
RootReport find_nonzero_roots(const FewnomialSample& sample);
std::vector<Complex> nonzero_roots(const FewnomialSample& sample);

/// Relative residual |p(z)| / sum_j |a_j z^j|, evaluated in log space.
double relative_residual(const FewnomialSample& sample, Complex z);

struct HistogramSpec {
  double rho_min = -6.0;
  double rho_max = 6.0;
  int bins = 24;
};

struct RadialHistogram {
  int N = 0;
  int n = 0;
  std::vector<double> edges;        // bins + 1
  std::vector<std::uint64_t> counts;
  std::vector<double> density;      // count / (accepted * N * width)
  /// Standard error from the spread of per-sample bin counts. The roots of
  /// one sparse polynomial crowd onto a few circles, so counts within a
  /// sample are strongly correlated and this exceeds the Poisson value.
  std::vector<double> std_error;
  std::vector<double> poisson_error;  // sqrt(count) / (accepted * N * width)
  std::uint64_t requested = 0;
  std::uint64_t accepted = 0;
  std::uint64_t failures = 0;
  std::uint64_t total_roots = 0;    // including roots outside the binned range
  std::uint64_t span_sum = 0;       // sum over accepted samples of max S - min S
  double span_sq_sum = 0.0;
  double max_residual = 0.0;

  /// total_roots / (accepted * N).
  double total_mass() const;
  /// Mean span of the accepted samples divided by N.
  double mean_span_over_N() const;
  /// Standard error of mean_span_over_N from the sample variance of spans.
  double span_std_error_over_N() const;
};

/// Zeros of `samples` random n-nomials in rho = log|z|^2. Sample i uses the
/// stream derived from (seed, i), so the result does not depend on workers.
RadialHistogram empirical_radial(int N, int n, std::uint64_t samples, const HistogramSpec& spec,
                                 std::uint64_t seed, unsigned workers = 0);

/// E[max S - min S] over uniform n-subsets S of {0, ..., N}, exact, by
/// grouping subsets on (min, max).
double expected_span_exact(int N, int n);
/// Same expectation by listing every subset; requires C(N+1, n) <= 1e7.
double expected_span_enumerate(int N, int n);
/// Monte Carlo estimate with standard error.
McEstimate expected_span_mc(int N, int n, std::uint64_t samples, std::uint64_t seed);
/// N(n - 1)/(n + 1) + 2n/(n + 1).
double expected_span_formula(int N, int n);

enum class SpanMode { Exact, Enumerate, MonteCarlo };
double expected_span(int N, int n, SpanMode mode, std::uint64_t samples = 100000,
                     std::uint64_t seed = 1);

}  // namespace fewnomial
