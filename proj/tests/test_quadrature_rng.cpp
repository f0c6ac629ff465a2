#include "fewnomial/parallel.hpp"
#include "fewnomial/quadrature.hpp"
#include "fewnomial/rng.hpp"

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <numbers>
#include <set>
#include <vector>

using namespace fewnomial;

TEST_CASE("integrate reproduces closed-form integrals") {
  CHECK(integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi).value ==
        doctest::Approx(2.0).epsilon(1e-13));
  // Kink at 1/3 declared as a breakpoint.
  const auto kink = integrate([](double x) { return std::abs(x - 1.0 / 3.0); }, 0.0, 1.0, {1.0 / 3.0});
  CHECK(kink.value == doctest::Approx(1.0 / 18.0 + 2.0 / 9.0).epsilon(1e-13));
  // Integrable endpoint singularity.
  CHECK(integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0).value ==
        doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("integrate ignores breakpoints outside the interval") {
  const auto r = integrate([](double x) { return x * x; }, 0.0, 1.0, {-1.0, 0.5, 0.5, 2.0});
  CHECK(r.value == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("integrate reports failure on a divergent integral") {
  CHECK_THROWS_AS(integrate([](double x) { return 1.0 / x; }, 0.0, 1.0), QuadratureError);
}

TEST_CASE("integrate_vector agrees componentwise with scalar integration") {
  auto f = [](double x) {
    Eigen::VectorXd v(3);
    v << std::exp(x), std::abs(x - 0.25), std::cos(7 * x);
    return v;
  };
  const auto r = integrate_vector(f, 3, 0.0, 1.0, {0.25});
  CHECK(r.value(0) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
  CHECK(r.value(1) == doctest::Approx(0.25 * 0.25 / 2 + 0.75 * 0.75 / 2).epsilon(1e-13));
  CHECK(r.value(2) == doctest::Approx(std::sin(7.0) / 7.0).epsilon(1e-12));
  CHECK(r.abs_error < 1e-10);
}

TEST_CASE("counter generator is a pure function of key and counter") {
  CounterRng a(42), b(42), c(43);
  std::vector<std::uint64_t> va, vb, vc;
  for (int i = 0; i < 100; ++i) {
    va.push_back(a.next_u64());
    vb.push_back(b.next_u64());
    vc.push_back(c.next_u64());
  }
  CHECK(va == vb);
  CHECK(va != vc);
  CounterRng skip(42, 10);
  CHECK(skip.next_u64() == va[10]);
}

TEST_CASE("derived keys are distinct") {
  std::set<std::uint64_t> keys;
  for (std::uint64_t i = 0; i < 10000; ++i) keys.insert(CounterRng::derive(7, i));
  CHECK(keys.size() == 10000);
  CHECK(CounterRng::derive(7, 3) == CounterRng::derive(7, 3));
}

TEST_CASE("variates have the right first two moments") {
  CounterRng rng(2024);
  const int count = 200000;
  double u = 0, e = 0, z = 0, z2 = 0, c2 = 0;
  bool open_interval = true;
  for (int i = 0; i < count; ++i) {
    const double x = rng.uniform();
    open_interval = open_interval && x > 0.0 && x < 1.0;
    u += x;
    e += rng.exponential();
    const double g = rng.normal();
    z += g;
    z2 += g * g;
    c2 += std::norm(rng.complex_normal());
  }
  CHECK(open_interval);
  // Tolerances are about 5 standard errors.
  CHECK(std::abs(u / count - 0.5) < 5 * std::sqrt(1.0 / 12 / count));
  CHECK(std::abs(e / count - 1.0) < 5 * std::sqrt(1.0 / count));
  CHECK(std::abs(z / count) < 5 * std::sqrt(1.0 / count));
  CHECK(std::abs(z2 / count - 1.0) < 5 * std::sqrt(2.0 / count));
  CHECK(std::abs(c2 / count - 1.0) < 5 * std::sqrt(1.0 / count));
}

TEST_CASE("below stays in range and hits every value") {
  CounterRng rng(5);
  std::vector<int> seen(7, 0);
  bool in_range = true;
  for (int i = 0; i < 7000; ++i) {
    const auto k = rng.below(7);
    in_range = in_range && k < 7;
    if (k < 7) ++seen[k];
  }
  CHECK(in_range);
  for (int s : seen) CHECK(s > 800);
}

TEST_CASE("parallel_for visits every index once") {
  for (unsigned workers : {1u, 3u}) {
    std::vector<std::atomic<int>> hits(101);
    parallel_for(hits.size(), workers, [&](std::size_t i) { ++hits[i]; });
    bool once = true;
    for (auto& h : hits) once = once && h.load() == 1;
    CHECK(once);
  }
  CHECK(default_workers() >= 1);
}
