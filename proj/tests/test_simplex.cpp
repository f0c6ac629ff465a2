#include "fewnomial/simplex.hpp"
#include "fewnomial/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>

using namespace fewnomial;

namespace {

RadialPoint random_rho(CounterRng& rng, int m, double range) {
  Vector r(m);
  for (int p = 0; p < m; ++p) r(p) = range * (2 * rng.uniform() - 1);
  return RadialPoint(r);
}

// mu from the textbook formula, fine for moderate rho.
Vector naive_mu(const Vector& rho) {
  Vector e(rho.size() + 1);
  e(0) = 1.0;
  for (int p = 0; p < rho.size(); ++p) e(p + 1) = std::exp(rho(p));
  return e / e.sum();
}

double factorial(int k) { return std::tgamma(k + 1.0); }

}  // namespace

TEST_CASE("moment map worked values") {
  const SimplexPoint a = moment_map({0.0});
  CHECK(a.at(1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(a.lambda0() == doctest::Approx(0.5).epsilon(1e-15));
  const SimplexPoint b = moment_map({0.0, 0.0});
  CHECK(b.at(0) == doctest::Approx(1.0 / 3));
  CHECK(b.at(1) == doctest::Approx(1.0 / 3));
  CHECK(b.at(2) == doctest::Approx(1.0 / 3));
  const SimplexPoint c = moment_map({std::log(2.0)});
  CHECK(c.at(1) == doctest::Approx(2.0 / 3).epsilon(1e-15));
  CHECK(c.lambda0() == doctest::Approx(1.0 / 3).epsilon(1e-15));
}

TEST_CASE("moment map agrees with the direct formula and survives large rho") {
  CounterRng rng(11);
  for (int k = 0; k < 20; ++k) {
    const RadialPoint r = random_rho(rng, 1 + k % 3, 5.0);
    const Vector mu = moment_map(r).homogeneous();
    CHECK((mu - naive_mu(r.values())).cwiseAbs().maxCoeff() < 1e-15);
  }
  const Vector big = moment_map({300.0, 0.0}).homogeneous();
  CHECK(big.allFinite());
  CHECK(big(1) == doctest::Approx(1.0));
  CHECK(big(0) == doctest::Approx(std::exp(-300.0)).epsilon(1e-13));
  CHECK(big(2) == doctest::Approx(std::exp(-300.0)).epsilon(1e-13));
  CHECK(moment_map({800.0, -800.0}).homogeneous().allFinite());
  CHECK(log_partition({800.0}) == doctest::Approx(800.0).epsilon(1e-15));
  CHECK(log_partition({0.0, 0.0}) == doctest::Approx(std::log(3.0)).epsilon(1e-15));
}

TEST_CASE("moment map is interior and sums to one (random property)") {
  CounterRng rng(12);
  for (int k = 0; k < 200; ++k) {
    const Vector mu = moment_map(random_rho(rng, 1 + k % 4, 30.0)).homogeneous();
    CHECK(mu.minCoeff() > 0.0);
    CHECK(std::abs(mu.sum() - 1.0) < 4e-16);
  }
}

TEST_CASE("jacobian worked values") {
  const Matrix j1 = moment_jacobian({0.0});
  CHECK(j1(1, 0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(j1(0, 0) == doctest::Approx(-0.25).epsilon(1e-15));
  const Matrix j2 = moment_jacobian({0.0, 0.0});
  CHECK(j2(1, 0) == doctest::Approx(2.0 / 9).epsilon(1e-15));
  CHECK(j2(1, 1) == doctest::Approx(-1.0 / 9).epsilon(1e-15));
  CHECK(j2(0, 0) == doctest::Approx(-1.0 / 9).epsilon(1e-15));
}

TEST_CASE("jacobian matches differences of the moment map with a second-order error") {
  CounterRng rng(13);
  for (int k = 0; k < 10; ++k) {
    const RadialPoint r = random_rho(rng, 1 + k % 3, 2.0);
    const int m = r.dim();
    const Matrix J = moment_jacobian(r);
    CHECK(J.colwise().sum().cwiseAbs().maxCoeff() < 1e-15);
    auto cd = [&](double h) {
      Matrix fd(m + 1, m);
      for (int p = 0; p < m; ++p) {
        Vector a = r.values(), b = r.values();
        a(p) += h;
        b(p) -= h;
        fd.col(p) = (moment_map(RadialPoint(a)).homogeneous() - moment_map(RadialPoint(b)).homogeneous()) / (2 * h);
      }
      return fd;
    };
    const double e3 = (cd(1e-3) - J).cwiseAbs().maxCoeff();
    const double e4 = (cd(1e-4) - J).cwiseAbs().maxCoeff();
    CHECK(e4 < 1e-8);
    // Truncation error scales like h^2 at these steps.
    CHECK(e3 / e4 == doctest::Approx(100.0).epsilon(0.3));
  }
}

TEST_CASE("second derivatives match differences of the jacobian") {
  CounterRng rng(14);
  for (int k = 0; k < 6; ++k) {
    const RadialPoint r = random_rho(rng, 1 + k % 3, 2.0);
    const int m = r.dim();
    const auto S = moment_second_derivatives(r);
    REQUIRE(static_cast<int>(S.size()) == m + 1);
    const double h = 1e-5;
    for (int q = 0; q < m; ++q) {
      Vector a = r.values(), b = r.values();
      a(q) += h;
      b(q) -= h;
      const Matrix d = (moment_jacobian(RadialPoint(a)) - moment_jacobian(RadialPoint(b))) / (2 * h);
      for (int i = 0; i <= m; ++i)
        for (int p = 0; p < m; ++p) CHECK(std::abs(S[i](p, q) - d(i, p)) < 1e-9);
    }
    for (int i = 0; i <= m; ++i) CHECK((S[i] - S[i].transpose()).cwiseAbs().maxCoeff() < 1e-16);
  }
}

TEST_CASE("simplex points validate their input") {
  CHECK_THROWS_AS(SimplexPoint(Vector::Constant(2, 0.6)), std::invalid_argument);
  CHECK_THROWS_AS(SimplexPoint(Vector::Constant(1, -0.1)), std::invalid_argument);
  Vector ok(2);
  ok << 0.25, 0.5;
  const SimplexPoint p(ok);
  CHECK(p.lambda0() == doctest::Approx(0.25));
  CHECK_THROWS_AS(BoundaryPoint(1, p), std::invalid_argument);
  const BoundaryPoint v = BoundaryPoint::vertex(2, 1, 0);
  CHECK(v.coords.at(1) == 1.0);
  CHECK(v.coords.at(0) == 0.0);
}

TEST_CASE("one-dimensional facet rules are vertices") {
  const FacetRule f0 = facet_rule(1, 0, 3);
  REQUIRE(f0.nodes.size() == 1);
  CHECK(f0.nodes[0].coords.at(1) == 1.0);
  CHECK(f0.weights[0] == 1.0);
  const FacetRule f1 = facet_rule(1, 1, 3);
  REQUIRE(f1.nodes.size() == 1);
  CHECK(f1.nodes[0].coords.at(1) == 0.0);
  CHECK(f1.weights[0] == 1.0);
}

TEST_CASE("facet rules integrate monomials like the uniform Dirichlet law") {
  // On a facet of dimension d the normalized measure is uniform on the
  // d-simplex spanned by the remaining d + 1 coordinates, so
  // E[prod x_j^a_j] = d! prod a_j! / (d + sum a_j)!.
  for (int m : {2, 3, 4}) {
    const int d = m - 1;
    const int degree = facet_rule_degree(m);
    for (int facet = 0; facet <= m; ++facet) {
      const FacetRule rule = facet_rule(m, facet, 2);
      double mass = 0.0;
      for (double w : rule.weights) {
        CHECK(w > 0.0);
        mass += w;
      }
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-13));
      for (const auto& x : rule.nodes) CHECK(x.coords.at(facet) == 0.0);

      // Exponent vectors over the m + 1 coordinates with total <= degree.
      std::function<void(int, int, std::vector<int>&)> visit = [&](int i, int left, std::vector<int>& a) {
        if (i > m) {
          if (a[facet] != 0) return;
          double exact = factorial(d);
          int total = 0;
          for (int j = 0; j <= m; ++j) {
            exact *= factorial(a[j]);
            total += a[j];
          }
          exact /= factorial(d + total);
          double q = 0.0;
          for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            double v = rule.weights[k];
            for (int j = 0; j <= m; ++j) v *= std::pow(rule.nodes[k].coords.at(j), a[j]);
            q += v;
          }
          CHECK(q == doctest::Approx(exact).epsilon(1e-12));
          return;
        }
        for (int e = 0; e <= left; ++e) {
          a[i] = e;
          visit(i + 1, left - e, a);
        }
        a[i] = 0;
      };
      std::vector<int> a(m + 1, 0);
      visit(0, degree, a);
    }
  }
}

TEST_CASE("facet rules converge for a non-polynomial integrand") {
  // E[sqrt(x_1)] on the segment x_2 = 0 of the 2-simplex: int_0^1 sqrt(x) dx = 2/3.
  double prev = 1.0;
  for (int order : {1, 4, 16}) {
    const FacetRule rule = facet_rule(2, 2, order);
    double q = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) q += rule.weights[k] * std::sqrt(rule.nodes[k].coords.at(1));
    const double err = std::abs(q - 2.0 / 3.0);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-4);
}
