#include "fewnomial/potential.hpp"
#include "fewnomial/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace fewnomial;

namespace {

// b(lambda, rho) straight from its definition.
double entropy_b(const Vector& lam_full, const Vector& rho) {
  double z = 1.0;
  for (int p = 0; p < rho.size(); ++p) z += std::exp(rho(p));
  double b = std::log(z);
  for (int i = 0; i < lam_full.size(); ++i) {
    if (lam_full(i) > 0) b += lam_full(i) * std::log(lam_full(i));
    if (i > 0) b -= rho(i - 1) * lam_full(i);
  }
  return b;
}

PotentialParams params_1d(double rho, int x) {
  return {RadialPoint{rho}, BoundaryPoint(x == 1 ? 0 : 1, SimplexPoint(Vector::Constant(1, x)))};
}

PotentialParams random_params(CounterRng& rng, int m, double range) {
  Vector r(m);
  for (int p = 0; p < m; ++p) r(p) = range * (2 * rng.uniform() - 1);
  const int facet = static_cast<int>(rng.below(m + 1));
  Vector full(m + 1);
  for (int i = 0; i <= m; ++i) full(i) = i == facet ? 0.0 : rng.exponential();
  full /= full.sum();
  return {RadialPoint(r), BoundaryPoint(facet, SimplexPoint::from_homogeneous(full))};
}

}  // namespace

TEST_CASE("b worked values") {
  CHECK(std::abs(b_eval(SimplexPoint(Vector::Constant(1, 0.5)), {0.0})) < 1e-16);
  CHECK(b_eval(SimplexPoint(Vector::Constant(1, 0.0)), {0.0}) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(b_eval(SimplexPoint(Vector::Constant(1, 1.0)), {1.0}) ==
        doctest::Approx(std::log1p(std::exp(1.0)) - 1.0).epsilon(1e-15));
  CHECK(b_max({0.0}) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(b_max({2.0}) == doctest::Approx(2.126928011042972).epsilon(1e-14));
  CHECK(b_max({-1.0, 3.0}) == doctest::Approx(std::log(1 + std::exp(-1.0) + std::exp(3.0)) + 1.0).epsilon(1e-15));
}

TEST_CASE("b is nonnegative, vanishes at mu, and peaks at a vertex (random property)") {
  CounterRng rng(21);
  for (int k = 0; k < 100; ++k) {
    const int m = 1 + k % 3;
    Vector r(m), full(m + 1);
    for (int p = 0; p < m; ++p) r(p) = 4 * (2 * rng.uniform() - 1);
    for (int i = 0; i <= m; ++i) full(i) = rng.exponential();
    full /= full.sum();
    const RadialPoint rho(r);
    const double b = b_eval(SimplexPoint::from_homogeneous(full), rho);
    CHECK(b >= 0.0);
    CHECK(b <= b_max(rho) + 1e-14);
    CHECK(b == doctest::Approx(entropy_b(full, r)).epsilon(1e-12));
    CHECK(std::abs(b_eval(moment_map(rho), rho)) < 1e-14);
  }
}

TEST_CASE("B worked values") {
  const auto p = params_1d(0.0, 1);
  CHECK(B_eval(0.0, p) == 0.0);
  CHECK(B_eval(1.0, p) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  const double expect = std::log(2.0) + 0.75 * std::log(0.75) + 0.25 * std::log(0.25);
  CHECK(B_eval(0.5, p) == doctest::Approx(expect).epsilon(1e-14));
  CHECK(expect == doctest::Approx(0.130812).epsilon(1e-5));
}

TEST_CASE("B agrees with b along the segment (random property)") {
  CounterRng rng(22);
  for (int k = 0; k < 60; ++k) {
    const auto p = random_params(rng, 1 + k % 3, 3.0);
    const Vector mu = moment_map(p.rho).homogeneous();
    const Vector x = p.x.coords.homogeneous();
    double prev = -1.0;
    for (double s : {0.0, 1e-6, 0.1, 0.37, 0.8, 0.999, 1.0}) {
      const double B = B_eval(s, p);
      CHECK(B == doctest::Approx(entropy_b((1 - s) * mu + s * x, p.rho.values())).epsilon(1e-10).scale(1e-3));
      CHECK(B > prev);
      prev = B;
    }
  }
}

TEST_CASE("B derivatives at the endpoints of the segment") {
  const auto p = params_1d(0.0, 1);
  const BDerivatives d0 = B_derivatives(0.0, p);
  CHECK(d0.B_s == 0.0);
  CHECK(d0.B_ss == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(d0.B_rho(0) == 0.0);
  CHECK(d0.B_rho_s(0) == 0.0);
  CHECK(d0.B_rhorho(0, 0) == 0.0);
  const BDerivatives d1 = B_derivatives(1.0, p);
  CHECK(d1.B_rho(0) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(d1.B_rhorho(0, 0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(std::isinf(d1.B_s));
  CHECK(std::isinf(d1.B_ss));
  const BEndpointData e = B_endpoint_data(p);
  CHECK(e.bss0 == doctest::Approx(1.0));
  CHECK(e.bmax == doctest::Approx(std::log(2.0)));
}

TEST_CASE("B derivatives match central differences (random property)") {
  CounterRng rng(23);
  for (int k = 0; k < 30; ++k) {
    const auto p = random_params(rng, 1 + k % 3, 2.0);
    const int m = p.rho.dim();
    const double s = 0.05 + 0.9 * rng.uniform();
    const double h = 1e-5;
    const BDerivatives d = B_derivatives(s, p);
    const double bs = (B_eval(s + h, p) - B_eval(s - h, p)) / (2 * h);
    CHECK(d.B_s == doctest::Approx(bs).epsilon(1e-7));
    const double bss = (B_derivatives(s + h, p).B_s - B_derivatives(s - h, p).B_s) / (2 * h);
    CHECK(d.B_ss == doctest::Approx(bss).epsilon(1e-7));
    for (int q = 0; q < m; ++q) {
      Vector a = p.rho.values(), b = p.rho.values();
      a(q) += h;
      b(q) -= h;
      const PotentialParams pa{RadialPoint(a), p.x}, pb{RadialPoint(b), p.x};
      CHECK(d.B_rho(q) == doctest::Approx((B_eval(s, pa) - B_eval(s, pb)) / (2 * h)).epsilon(1e-6).scale(1e-6));
      const Vector col = (B_derivatives(s, pa).B_rho - B_derivatives(s, pb).B_rho) / (2 * h);
      for (int r = 0; r < m; ++r) CHECK(d.B_rhorho(r, q) == doctest::Approx(col(r)).epsilon(1e-6).scale(1e-6));
    }
    const Vector brs = (B_derivatives(s + h, p).B_rho - B_derivatives(s - h, p).B_rho) / (2 * h);
    for (int q = 0; q < m; ++q) CHECK(d.B_rho_s(q) == doctest::Approx(brs(q)).epsilon(1e-6).scale(1e-6));
  }
}

TEST_CASE("solve_h inverts B and clamps outside [0, b]") {
  const auto p = params_1d(0.0, 1);
  CHECK(solve_h(0.0, p) == 0.0);
  CHECK_THROWS_AS(solve_h(-1.0, p), std::domain_error);
  CHECK(solve_h(std::log(2.0), p) == 1.0);
  CHECK(solve_h(5.0, p) == 1.0);
  const double t = std::log(2.0) + 0.75 * std::log(0.75) + 0.25 * std::log(0.25);
  CHECK(solve_h(t, p) == doctest::Approx(0.5).epsilon(1e-12));

  CounterRng rng(24);
  for (int k = 0; k < 100; ++k) {
    const auto q = random_params(rng, 1 + k % 3, 4.0);
    const double top = B_eval(1.0, q);
    const double tt = top * rng.uniform();
    CHECK(B_eval(solve_h(tt, q), q) == doctest::Approx(tt).epsilon(1e-11).scale(1e-13));
  }
}

TEST_CASE("h derivatives: interior difference check and end values") {
  const auto p = params_1d(0.0, 1);
  const double t = 0.3, dt = 1e-5;
  const HDerivatives d = h_derivatives(t, p);
  CHECK(d.h_t == doctest::Approx((solve_h(t + dt, p) - solve_h(t - dt, p)) / (2 * dt)).epsilon(1e-6));
  const HDerivatives z = h_derivatives(0.0, p);
  CHECK(std::isinf(z.h_t));
  CHECK(z.h_times_ht == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(z.h_rho(0) == 0.0);
  const HDerivatives top = h_derivatives(std::log(2.0), p);
  CHECK(top.h_t == 0.0);
  CHECK(top.h_rho(0) == 0.0);
  // A top that undershoots by rounding still counts as the top.
  const double below = std::nextafter(std::nextafter(std::log(2.0), 0.0), 0.0);
  CHECK(solve_h(below, p) == 1.0);
  CHECK(h_derivatives(below, p).h_rho(0) == 0.0);
  CHECK(h_derivatives(std::log(2.0) - 1e-12, p).h_t > 0.0);

  CounterRng rng(25);
  for (int k = 0; k < 20; ++k) {
    const auto q = random_params(rng, 1 + k % 3, 2.0);
    const int m = q.rho.dim();
    const double tt = B_eval(1.0, q) * (0.1 + 0.8 * rng.uniform());
    const HDerivatives hd = h_derivatives(tt, q);
    const double h = 1e-6;
    CHECK(hd.h_t == doctest::Approx((solve_h(tt + h, q) - solve_h(tt - h, q)) / (2 * h)).epsilon(1e-5));
    for (int r = 0; r < m; ++r) {
      Vector a = q.rho.values(), b = q.rho.values();
      a(r) += h;
      b(r) -= h;
      const double fd = (solve_h(tt, {RadialPoint(a), q.x}) - solve_h(tt, {RadialPoint(b), q.x})) / (2 * h);
      CHECK(hd.h_rho(r) == doctest::Approx(fd).epsilon(1e-5).scale(1e-5));
    }
  }
}

TEST_CASE("stilde ratio tends to e^rho") {
  CHECK(stilde(1e-4, 0.0, 0) == doctest::Approx(1e-4).epsilon(1e-12));
  for (double rho : {-2.0, -1.0, 1.0, 2.0}) {
    CHECK(stilde(1e-4, rho, 0) / 1e-4 == doctest::Approx(std::exp(rho)).epsilon(1e-2));
    CHECK(stilde(1e-4, rho, 1) / 1e-4 == doctest::Approx(std::exp(-rho)).epsilon(1e-2));
  }
  // Defining property: equal heights on the two sides of mu.
  const double s = 0.3, rho = 0.8;
  const double st = stilde(s, rho, 0);
  CHECK(B_eval(st, params_1d(rho, 1)) == doctest::Approx(B_eval(s, params_1d(rho, 0))).epsilon(1e-11));
}
