#pragma once

#include <complex>
#include <cstdint>

namespace fewnomial {

/// Counter-based generator: the n-th draw is a pure function of (key, n), so
/// independent streams are obtained by deriving keys rather than by seeding
/// and advancing shared state.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0) noexcept
      : key_(key), counter_(counter) {}

  /// Key for sub-stream `index` of stream `key`.
  static std::uint64_t derive(std::uint64_t key, std::uint64_t index) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform on the open interval (0, 1).
  double uniform() noexcept;
  /// Exp(1) variate.
  double exponential() noexcept;
  /// Standard normal (Box-Muller, both halves consumed in pairs).
  double normal() noexcept;
  /// Standard complex Gaussian: E|z|^2 = 1.
  std::complex<double> complex_normal() noexcept;
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace fewnomial
