#include "fewnomial/verify.hpp"

#include "fewnomial/density.hpp"
#include "fewnomial/ensemble.hpp"
#include "fewnomial/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace fewnomial {
namespace {

constexpr double kPerturbation = 1e-3;

struct Context {
  const VerifyOptions& opt;
  CounterRng rng;
  std::vector<CheckResult>& out;
  const std::function<void(const CheckResult&)>& sink;
  std::string suite;

  void check(const std::string& name, double measured, double tolerance, std::string note = {}) {
    const bool pass = std::isfinite(measured) && measured <= tolerance;
    out.push_back({suite, name, measured, tolerance, pass, std::move(note)});
    if (sink) sink(out.back());
  }
  double uniform(double a, double b) { return a + (b - a) * rng.uniform(); }
  RadialPoint radial(int m, double range) {
    Vector r(m);
    for (int p = 0; p < m; ++p) r(p) = uniform(-range, range);
    return RadialPoint(r);
  }
  // Uniform point of facet `facet` (coordinate `facet` set to zero).
  BoundaryPoint boundary(int m, int facet) {
    Vector full(m + 1);
    for (int i = 0; i <= m; ++i) full(i) = i == facet ? 0.0 : rng.exponential();
    full /= full.sum();
    return BoundaryPoint(facet, SimplexPoint::from_homogeneous(full));
  }
  BoundaryPoint boundary(int m) { return boundary(m, static_cast<int>(rng.below(m + 1))); }
  // Analytic path input, shifted under --perturb.
  RadialPoint analytic(const RadialPoint& rho) const {
    if (!opt.perturb) return rho;
    return RadialPoint(Vector(rho.values().array() + kPerturbation));
  }
};

double rel(double a, double b, double floor = 0.0) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor, 1e-300});
}

double rel(const Matrix& a, const Matrix& b, double floor = 0.0) {
  const double scale = std::max({a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff(), floor, 1e-300});
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

// ---------------------------------------------------------------- simplex

void suite_simplex(Context& c) {
  double sum_err = 0.0, col_err = 0.0, sym_err = 0.0;
  for (int k = 0; k < 60; ++k) {
    const int m = 1 + k % 3;
    const RadialPoint r = c.radial(m, 15.0);
    sum_err = std::max(sum_err, std::abs(moment_map(r).homogeneous().sum() - 1.0));
    const Matrix J = moment_jacobian(r);
    col_err = std::max(col_err, J.colwise().sum().cwiseAbs().maxCoeff());
    const Matrix inner = J.bottomRows(m);
    sym_err = std::max(sym_err, (inner - inner.transpose()).cwiseAbs().maxCoeff());
  }
  c.check("moment map sums to one", sum_err, 4e-16);
  c.check("jacobian columns sum to zero", col_err, 1e-15);
  c.check("jacobian symmetric", sym_err, 0.0);

  // Central differences: the error ratio between steps 1e-3 and 1e-4 is ~100
  // for an O(step^2) method. At 1e-5 rounding (~eps/step) already competes
  // with truncation, so that ratio is only reported.
  std::vector<double> ratios, fine_ratios;
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const int m = 1 + k % 3;
    const RadialPoint r = c.radial(m, 3.0);
    const Matrix J = moment_jacobian(c.analytic(r));
    auto fd = [&](double h) {
      Matrix out(m + 1, m);
      for (int p = 0; p < m; ++p) {
        Vector a = r.values(), b = r.values();
        a(p) += h;
        b(p) -= h;
        out.col(p) = (moment_map(RadialPoint(a)).homogeneous() - moment_map(RadialPoint(b)).homogeneous()) / (2 * h);
      }
      return out;
    };
    const double e3 = (fd(1e-3) - J).cwiseAbs().maxCoeff();
    const double e4 = (fd(1e-4) - J).cwiseAbs().maxCoeff();
    const double e5 = (fd(1e-5) - J).cwiseAbs().maxCoeff();
    worst = std::max(worst, e4);
    ratios.push_back(e3 / e4);
    fine_ratios.push_back(e4 / e5);
  }
  std::sort(ratios.begin(), ratios.end());
  std::sort(fine_ratios.begin(), fine_ratios.end());
  const double median = 0.5 * (ratios[4] + ratios[5]);
  const double fine = 0.5 * (fine_ratios[4] + fine_ratios[5]);
  c.check("jacobian matches central differences (step 1e-4)", worst, 1e-8);
  c.check("central-difference error ratio 1e-3/1e-4 near 100 (|log10 ratio - 2|)",
          std::abs(std::log10(median) - 2.0), 0.2,
          "median ratio " + fmt(median) + "; 1e-4/1e-5 ratio " + fmt(fine));

  double mass_err = 0.0, node_err = 0.0;
  for (int m = 1; m <= 4; ++m)
    for (int order = 1; order <= (m >= 4 ? 3 : 6); ++order)
      for (const FacetRule& rule : facet_rules(m, order)) {
        double s = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
          s += rule.weights[k];
          node_err = std::max(node_err, std::abs(rule.nodes[k].coords.at(rule.facet)));
          if (!(rule.weights[k] > 0.0)) node_err = 1.0;
        }
        mass_err = std::max(mass_err, std::abs(s - 1.0));
      }
  c.check("facet rules have mass one", mass_err, 1e-12);
  c.check("facet nodes on their facet, weights positive", node_err, 0.0);

  // Exactness: normalized integral of prod y_j^{a_j} over the d-simplex is
  // d! prod a_j! / (d + |a|)!.
  double exact_err = 0.0;
  for (int m = 2; m <= 3; ++m) {
    const int d = m - 1;
    const int degree = facet_rule_degree(m);
    for (int facet = 0; facet <= m; ++facet)
      for (int order : {1, 3}) {
        const FacetRule rule = facet_rule(m, facet, order);
        for (int a1 = 0; a1 <= degree; ++a1)
          for (int a2 = 0; a2 + a1 <= degree && (d == 2 || a2 == 0); ++a2) {
            // Coordinates other than `facet`, in increasing index order.
            double q = 0.0;
            for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
              std::vector<double> y;
              for (int i = 0; i <= m; ++i)
                if (i != facet) y.push_back(rule.nodes[k].coords.at(i));
              q += rule.weights[k] * std::pow(y[0], a1) * (d == 2 ? std::pow(y[1], a2) : 1.0);
            }
            const double ref = std::exp(std::lgamma(d + 1.0) + std::lgamma(a1 + 1.0) + std::lgamma(a2 + 1.0) -
                                        std::lgamma(d + a1 + a2 + 1.0));
            exact_err = std::max(exact_err, std::abs(q - ref));
          }
      }
  }
  c.check("facet rules exact through their stated degree", exact_err, 1e-13);

  // Change of variables: sum_i mu_i (facet mass) int_0^1 m s^{m-1} ds = 1.
  double cov_err = 0.0;
  for (int m = 1; m <= 3; ++m) {
    const RadialPoint r = c.radial(m, 2.0);
    const Vector mu = moment_map(r).homogeneous();
    const double radial = integrate([m](double s) { return m * std::pow(s, m - 1); }, 0.0, 1.0).value;
    double total = 0.0;
    for (const FacetRule& rule : facet_rules(m, 2)) {
      double mass = 0.0;
      for (double w : rule.weights) mass += w;
      total += mu(rule.facet) * mass * radial;
    }
    cov_err = std::max(cov_err, std::abs(total - 1.0));
  }
  c.check("facet decomposition reproduces the simplex volume", cov_err, 1e-12);
}

// -------------------------------------------------------------- potential

void suite_potential(Context& c) {
  double ex = 0.0;
  ex = std::max(ex, std::abs(b_eval(SimplexPoint(Vector::Constant(1, 0.5)), {0.0})));
  ex = std::max(ex, rel(b_eval(SimplexPoint(Vector::Constant(1, 0.0)), {0.0}), std::log(2.0)));
  ex = std::max(ex, rel(b_eval(SimplexPoint(Vector::Constant(1, 1.0)), {1.0}), std::log1p(std::exp(1.0)) - 1.0));
  ex = std::max(ex, rel(b_max({2.0}), std::log1p(std::exp(2.0))));
  ex = std::max(ex, rel(b_max({-1.0, 3.0}), std::log(1.0 + std::exp(-1.0) + std::exp(3.0)) + 1.0));
  const PotentialParams half{{0.0}, BoundaryPoint::vertex(1, 1, 0)};
  ex = std::max(ex, rel(B_eval(0.5, half), std::log(2.0) + 0.75 * std::log(0.75) + 0.25 * std::log(0.25)));
  c.check("worked values of b, b_max and B", ex, 1e-14);

  // Round trip and monotonicity of solve_h.
  double rt = 0.0;
  int non_monotone = 0;
  for (int k = 0; k < 200; ++k) {
    const int m = 1 + k % 3;
    const RadialPoint r = c.radial(m, 4.0);
    const PotentialParams p{r, c.boundary(m)};
    const double top = B_eval(1.0, p);
    const double t = top * c.rng.uniform();
    rt = std::max(rt, std::abs(B_eval(solve_h(t, p), p) - t) / std::max(1.0, t));
    if (k % 20 == 0) {
      double prev = -1.0;
      for (int j = 1; j <= 50; ++j) {
        const double s = solve_h(top * j / 51.0, p);
        if (!(s > prev)) ++non_monotone;
        prev = s;
      }
    }
  }
  c.check("B(solve_h(t)) = t", rt, 1e-11);
  c.check("solve_h strictly increasing in t", non_monotone, 0);

  // Derivative blocks against Richardson differences of B_eval.
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int m = 1 + k % 3;
    const RadialPoint r = c.radial(m, 3.0);
    const BoundaryPoint x = c.boundary(m);
    const double s = c.uniform(0.05, 0.95);
    const BDerivatives d = B_derivatives(s, {c.analytic(r), x});
    auto B = [&](double ss, const Vector& rr) { return B_eval(ss, {RadialPoint(rr), x}); };
    const double h = 1e-3;
    auto d_s = [&](const Vector& rr) {
      auto cd = [&](double hh) { return (B(s + hh, rr) - B(s - hh, rr)) / (2 * hh); };
      return (4 * cd(h / 2) - cd(h)) / 3;
    };
    auto dd_s = [&](const Vector& rr) {
      auto cd = [&](double hh) { return (B(s + hh, rr) - 2 * B(s, rr) + B(s - hh, rr)) / (hh * hh); };
      return (4 * cd(h / 2) - cd(h)) / 3;
    };
    worst = std::max(worst, rel(d.B_s, d_s(r.values())));
    worst = std::max(worst, rel(d.B_ss, dd_s(r.values())));
    const Vector g = fd_gradient([&](const Vector& rr) { return B(s, rr); }, r.values(), h);
    const Vector gs = fd_gradient(d_s, r.values(), h);
    const Matrix H = fd_hessian([&](const Vector& rr) { return B(s, rr); }, r.values(), h);
    const double gscale = std::max(1e-3, std::abs(d.B_s));
    worst = std::max(worst, rel(d.B_rho, g, gscale));
    worst = std::max(worst, rel(d.B_rho_s, gs, gscale));
    worst = std::max(worst, rel(d.B_rhorho, H, gscale));
  }
  c.check("B derivative blocks match finite differences", worst, 1e-6);

  // Small s: derivatives approach the s = 0 record within O(s log s).
  double band = 0.0;
  for (int k = 0; k < 30; ++k) {
    const int m = 1 + k % 3;
    const PotentialParams p{c.radial(m, 3.0), c.boundary(m)};
    const BDerivatives d0 = B_derivatives(0.0, p);
    const double s = 1e-6;
    const BDerivatives d = B_derivatives(s, p);
    const double scale = 10.0 * s * std::abs(std::log(s)) * (1.0 + d0.B_ss * d0.B_ss);
    double gap = std::abs(d.B_s - d0.B_s);
    gap = std::max(gap, std::abs(d.B_ss - d0.B_ss));
    gap = std::max(gap, (d.B_rho - d0.B_rho).cwiseAbs().maxCoeff());
    gap = std::max(gap, (d.B_rho_s - d0.B_rho_s).cwiseAbs().maxCoeff());
    gap = std::max(gap, (d.B_rhorho - d0.B_rhorho).cwiseAbs().maxCoeff());
    band = std::max(band, gap / scale);
  }
  c.check("derivatives at s = 1e-6 within O(s log s) of the s = 0 values", band, 1.0);

  // h_t against a centered difference of solve_h.
  const PotentialParams p{{0.0}, BoundaryPoint::vertex(1, 1, 0)};
  const double ht = h_derivatives(0.3, p).h_t;
  const double step = 1e-5;
  const double fd = (solve_h(0.3 + step, p) - solve_h(0.3 - step, p)) / (2 * step);
  c.check("h_t matches centered difference (m=1, rho=0, t=0.3)", rel(ht, fd), 1e-6);
}

// --------------------------------------------------------------- boundary

void suite_boundary(Context& c) {
  double s0 = 0.0, hh0 = 0.0, ends = 0.0;
  int non_monotone_b = 0, non_monotone_h = 0;
  for (int k = 0; k < 50; ++k) {
    const int m = 1 + k % 3;
    const RadialPoint r = c.radial(m, 3.0);
    const BoundaryPoint x = c.boundary(m);
    const PotentialParams p{r, x};
    const PotentialParams pa{c.analytic(r), x};
    // Closed form from an independent evaluation of mu.
    const Vector mu = moment_map(r).homogeneous();
    const Vector xv = x.coords.homogeneous();
    double bss0 = 0.0;
    for (int i = 0; i <= m; ++i) bss0 += (xv(i) - mu(i)) * (xv(i) - mu(i)) / mu(i);
    const BDerivatives d = B_derivatives(0.0, pa);
    s0 = std::max({s0, std::abs(d.B_s), rel(d.B_ss, bss0), d.B_rho.cwiseAbs().maxCoeff(),
                   d.B_rho_s.cwiseAbs().maxCoeff(), d.B_rhorho.cwiseAbs().maxCoeff(),
                   std::abs(B_eval(0.0, pa))});

    // s -> 1 limits approached monotonically.
    const Vector lim_rho = -(xv - mu).tail(m);
    const Matrix lim_rhorho = moment_jacobian(r).bottomRows(m);
    double prev_a = INFINITY, prev_b = INFINITY;
    for (int e = 2; e <= 6; ++e) {
      const BDerivatives de = B_derivatives(1.0 - std::pow(10.0, -e), p);
      const double a = (de.B_rho - lim_rho).cwiseAbs().maxCoeff();
      const double b = (de.B_rhorho - lim_rhorho).cwiseAbs().maxCoeff();
      if (!(a < prev_a) && a > 1e-15) ++non_monotone_b;
      if (!(b < prev_b) && b > 1e-15) ++non_monotone_b;
      prev_a = a;
      prev_b = b;
    }
    const BDerivatives d1 = B_derivatives(1.0, p);
    ends = std::max({ends, (d1.B_rho - lim_rho).cwiseAbs().maxCoeff(),
                     (d1.B_rhorho - lim_rhorho).cwiseAbs().maxCoeff()});
    if (!(std::isinf(d1.B_s) && std::isinf(d1.B_ss))) ends = 1.0;

    // Extensions of h.
    const double top = B_eval(1.0, p);
    ends = std::max({ends, std::abs(solve_h(0.0, p)), std::abs(solve_h(top, p) - 1.0),
                     std::abs(solve_h(2.0 * top, p) - 1.0)});
    const HDerivatives hz = h_derivatives(0.0, pa);
    hh0 = std::max(hh0, rel(hz.h_times_ht, 1.0 / bss0));
    if (!std::isinf(hz.h_t) || hz.h_rho.cwiseAbs().maxCoeff() != 0.0) hh0 = 1.0;
    const HDerivatives ht = h_derivatives(top, p);
    ends = std::max({ends, std::abs(ht.h_t), ht.h_rho.cwiseAbs().maxCoeff()});
    double prev0 = INFINITY, prev1 = INFINITY;
    for (int e = 2; e <= 10; e += 2) {
      const double small = h_derivatives(top * std::pow(10.0, -e), p).h_rho.cwiseAbs().maxCoeff();
      const double near = h_derivatives(top * (1.0 - std::pow(10.0, -e)), p).h_rho.cwiseAbs().maxCoeff();
      if (!(small < prev0)) ++non_monotone_h;
      if (!(near < prev1) && near > 1e-15) ++non_monotone_h;
      prev0 = small;
      prev1 = near;
    }
  }
  c.check("s=0 values: B=0, B_s=0, B_ss closed form, B_rho=B_rho_s=B_rhorho=0", s0, 1e-14);
  c.check("B_rho and B_rhorho approach their s=1 limits monotonically", non_monotone_b, 0);
  c.check("s=1 limits and h clamps exact", ends, 1e-13);
  c.check("h*h_t at t=0 equals 1/B_ss(0)", hh0, 1e-14);
  c.check("h_rho decreases toward 0 at both ends of [0, b]", non_monotone_h, 0);
}

// ----------------------------------------------------------------- stilde

void suite_stilde(Context& c) {
  for (double rho : {-2.0, -1.0, 1.0, 2.0}) {
    const double ra = c.analytic(RadialPoint{rho}).at(1);
    const double s = 1e-4;
    const double ratio = stilde(s, ra, 0) / s;
    c.check("s~/s within 1% of e^rho at rho=" + fmt(rho), rel(ratio, std::exp(rho)), 1e-2,
            "ratio " + fmt(ratio));
    const double back = stilde(s, ra, 1) / s;
    c.check("s~/s within 1% of e^-rho from x=1 at rho=" + fmt(rho), rel(back, std::exp(-rho)), 1e-2,
            "ratio " + fmt(back));
  }
  double sym = 0.0;
  for (double s : {1e-4, 1e-2, 0.1}) sym = std::max(sym, rel(stilde(s, 0.0, 0), s));
  c.check("s~ = s at rho=0", sym, 1e-12);
}

// ----------------------------------------------------------- distribution

// D(t, 0) for m = 1 by bisection on the binary entropy equation.
double binary_entropy_D(double t) {
  const double target = t - std::log(2.0);
  double lo = 0.5, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double v = mid * std::log(mid) + (1 - mid) * std::log1p(-mid);
    (v < target ? lo : hi) = mid;
  }
  return 2.0 * (0.5 * (lo + hi)) - 1.0;
}

void suite_distribution(Context& c) {
  c.check("D(0.1, 0) against the binary-entropy oracle", std::abs(D_eval(0.1, {0.0}) - binary_entropy_D(0.1)), 1e-12,
          "oracle " + fmt(binary_entropy_D(0.1)));
  double ends = 0.0;
  for (int m = 1; m <= 3; ++m) {
    const RadialPoint r = c.radial(m, 2.0);
    const FacetModel model(r, 0);
    ends = std::max({ends, model.value(0.0), std::abs(model.value(model.b_max()) - 1.0),
                     model.drho(0.0).cwiseAbs().maxCoeff(), model.drho(model.b_max()).cwiseAbs().maxCoeff()});
  }
  c.check("D = 0 at t = 0, D = 1 and D_rho = 0 at b_max", ends, 1e-13);
  const double dt0 = D_t_eval(0.0, {0.0, 0.0});
  c.check("D_t(0) finite and positive for m=2", std::isfinite(dt0) && dt0 > 0 ? 0.0 : 1.0, 0.0, "value " + fmt(dt0));

  int bad = 0;
  for (int k = 0; k < 20; ++k) {
    const int m = 1 + k % 2;
    const FacetModel model(c.radial(m, 3.0), 0);
    double prev = -1.0;
    for (int j = 0; j < 50; ++j) {
      const double v = model.value(model.b_max() * j / 49.0);
      if (v < prev - 1e-15 || v < 0.0 || v > 1.0) ++bad;
      prev = v;
    }
    if (model.value(0.0) != 0.0 || model.value(model.b_max()) != 1.0) ++bad;
  }
  c.check("D nondecreasing from 0 to 1 on [0, b_max]", bad, 0);

  double sym = 0.0;
  for (int k = 0; k < 10; ++k) {
    const double r = c.uniform(-3, 3);
    const double t = c.uniform(0, 1) * b_max({r});
    sym = std::max(sym, std::abs(D_eval(t, {r}) - D_eval(t, {-r})));
    const double a = c.uniform(-2, 2), b = c.uniform(-2, 2);
    const double t2 = c.uniform(0, 1) * b_max({a, b});
    sym = std::max(sym, std::abs(D_eval(t2, {a, b}) - D_eval(t2, {b, a})));
  }
  c.check("D symmetric under rho -> -rho (m=1) and coordinate swaps (m=2)", sym, 1e-12);

  // Independent Monte Carlo oracle.
  double worst_z = 0.0;
  for (int k = 0; k < 30; ++k) {
    const int m = 1 + k % 3;
    const RadialPoint r = c.radial(m, 2.0);
    const double t = c.uniform(0.02, 0.9) * b_max(r);
    const McEstimate mc = D_mc_oracle(t, r, 1000000, CounterRng::derive(c.opt.seed, 1000 + k), c.opt.workers);
    const double d = D_eval(t, c.analytic(r));
    worst_z = std::max(worst_z, std::abs(d - mc.value) / std::max(mc.std_error, 1e-12));
  }
  c.check("D agrees with Monte Carlo (30 points, 1e6 samples), max |z|", worst_z, 4.0);

  // Derivatives of the discretized D against differences of D.
  double worst = 0.0;
  for (int k = 0; k < 12; ++k) {
    const int m = 1 + k % 2;
    const RadialPoint r = c.radial(m, 2.0);
    const FacetModel model(c.analytic(r), 0);
    // D_t drops like 1/log at every kink b(x_k); difference away from them.
    const auto& kinks = model.kinks();
    std::size_t j = 0;
    double gap = 0.0, t = 0.0;
    for (int tries = 0; tries < 50 && gap < 1e-4 * model.b_max(); ++tries) {
      j = static_cast<std::size_t>(c.rng.below(kinks.size()));
      const double lo = j == 0 ? 0.05 * model.b_max() : kinks[j - 1];
      gap = kinks[j] - lo;
      t = 0.5 * (lo + kinks[j]);
    }
    const double h = std::min(1e-4 * model.b_max(), 0.1 * gap);
    auto Dt = [&](double tt) { return D_eval(tt, r); };
    auto cd = [&](double hh) { return (Dt(t + hh) - Dt(t - hh)) / (2 * hh); };
    worst = std::max(worst, rel(model.dt(t), (4 * cd(h / 2) - cd(h)) / 3));
    const Vector g = fd_gradient([&](const Vector& rr) { return D_eval(t, RadialPoint(rr)); }, r.values(), 1e-4);
    worst = std::max(worst, rel(model.drho(t), g, 1e-3));
  }
  c.check("D_t and D_rho match finite differences of D", worst, 1e-5);

  // D(t)/sqrt(t) settles as t -> 0 (m = 1).
  double cauchy = 0.0;
  for (double rho : {-1.5, 0.0, 0.7}) {
    double prev = NAN;
    for (int e = 4; e <= 8; ++e) {
      const double t = std::pow(10.0, -e);
      const double q = D_eval(t, {rho}) / std::sqrt(t);
      if (!std::isnan(prev)) cauchy = std::max(cauchy, rel(q, prev));
      prev = q;
    }
  }
  c.check("D(t)/sqrt(t) converges as t -> 0 (successive ratios within 1%)", cauchy, 1e-2);
}

// ---------------------------------------------------------------- density

void suite_density(Context& c) {
  c.check("G_1(0) = log 2 - 1/2", std::abs(G_eval(1, {0.0}) - (std::log(2.0) - 0.5)), 1e-12);
  c.check("F_1(0) = 1/2", std::abs(F_eval(1, {0.0}) - 0.5), 1e-12);
  const Rational r2 = expected_mass(2), r4 = expected_mass(4);
  c.check("expected_mass(2) = 1/3 and expected_mass(4) = 3/5",
          (r2.num == 1 && r2.den == 3 && r4.num == 3 && r4.den == 5) ? 0.0 : 1.0, 0.0);

  for (int n : {2, 4, 8}) {
    const double mass = integrate([n](double r) { return radial_density(n, r); }, -40.0, 40.0, {0.0},
                                  {1e-9, 1e-8, 2000}).value;
    c.check("mass identity n=" + std::to_string(n), std::abs(mass - expected_mass(n).value()), 1e-3,
            "integral " + fmt(mass));
  }

  // Odd part and asymptotic slopes of F_n.
  double odd = 0.0, slope = 0.0;
  for (int n : {2, 4}) {
    for (double r : {0.5, 2.0, 7.0}) odd = std::max(odd, std::abs(F_eval(n, {r}) - F_eval(n, {-r}) - r));
    slope = std::max(slope, std::abs(F_grad(n, {12.0})(0) - n / (n + 1.0)));
    slope = std::max(slope, std::abs(F_grad(n, {-12.0})(0) - 1.0 / (n + 1.0)));
  }
  c.check("F_n(rho) - F_n(-rho) = rho", odd, 1e-10);
  c.check("F_n' tends to n/(n+1) and 1/(n+1) at rho = +-12", slope, 1e-3);

  // Derivative paths.
  double grad_err = 0.0, hess_err = 0.0, kk_err = 0.0;
  std::vector<std::pair<int, RadialPoint>> points;
  for (int k = 0; k < 6; ++k) points.emplace_back(2 + k % 3, c.radial(1, 3.0));
  points.emplace_back(3, c.radial(2, 1.5));
  for (const auto& [n, r] : points) {
    DensityOptions o;
    o.order = r.dim() == 1 ? 1 : 2;
    const RadialPoint ra = c.analytic(r);
    auto G = [&](const Vector& x) { return G_eval(n, RadialPoint(x), o); };
    auto F = [&](const Vector& x) { return F_eval(n, RadialPoint(x), o); };
    const Vector g = G_grad(n, ra, o);
    grad_err = std::max(grad_err, rel(g, fd_gradient(G, r.values(), 1e-2), 1e-2));
    const Matrix H = G_hessian(n, ra, o);
    const Matrix Hfd = fd_jacobian([&](const Vector& x) { return G_grad(n, RadialPoint(x), o); }, r.values(), 1e-2);
    hess_err = std::max(hess_err, rel(H, Hfd, 1e-2));
    const int m = r.dim();
    const double fact = m == 1 ? 1.0 : 2.0;
    const double kk = kk_density(n, ra, o);
    const double kk_fd = fact * (fd_hessian(F, r.values(), 1e-2) / (2 * std::numbers::pi)).determinant();
    kk_err = std::max(kk_err, rel(kk, kk_fd, 1e-4));
  }
  c.check("G_grad matches differences of G", grad_err, 1e-6);
  c.check("G_hessian matches differences of G_grad", hess_err, 1e-5);
  c.check("kk_density matches the finite-difference Hessian of F", kk_err, 1e-4);

  {
    DensityOptions o;
    o.order = 2;
    const Matrix H = G_hessian(3, {0.0, 0.0}, o);
    c.check("Hessian at rho=(0,0): symmetric, equal diagonal",
            std::max(std::abs(H(0, 1) - H(1, 0)), std::abs(H(0, 0) - H(1, 1))), 1e-8);
  }

  // Figure curves on [-12, 12], 241 points.
  const std::vector<int> ns{2, 4, 8, 32, 128};
  std::map<int, std::vector<double>> curves;
  std::vector<double> grid;
  for (int i = 0; i < 241; ++i) grid.push_back(-12.0 + 0.1 * i);
  for (int n : ns)
    for (double r : grid) curves[n].push_back(radial_density(n, r));
  double order_gap = 0.0, quotient = 0.0, negative = 0.0, norm_err = 0.0, even = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = 0; j + 1 < ns.size(); ++j)
      order_gap = std::max(order_gap, curves[ns[j]][i] - curves[ns[j + 1]][i]);
    for (int n : ns) {
      quotient = std::max(quotient, curves[n][i] - fs_density(grid[i]));
      negative = std::max(negative, -curves[n][i]);
      even = std::max(even, std::abs(curves[n][i] - curves[n][grid.size() - 1 - i]));
    }
  }
  for (int n : ns) {
    double trap = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) trap += 0.05 * (curves[n][i] + curves[n][i + 1]);
    norm_err = std::max(norm_err, std::abs(trap / expected_mass(n).value() - 1.0));
  }
  c.check("f_n increasing in n on the grid (n = 2, 4, 8, 32, 128)", order_gap, 1e-6);
  c.check("f_n <= fs_density on the grid", quotient, 1e-6);
  c.check("f_n >= 0 on the grid", negative, 1e-8);
  c.check("f_n even in rho", even, 1e-10);
  c.check("normalized curves integrate to 1", norm_err, 2e-3);

  // Continuity: max second difference shrinks under halving.
  std::vector<double> maxdd;
  for (int level = 0; level < 4; ++level) {
    const double h = 0.05 / (1 << level);
    const int count = static_cast<int>(std::lround(2.0 / h));
    std::vector<double> f;
    for (int i = 0; i <= count; ++i) f.push_back(radial_density(4, -1.0 + i * h));
    double dd = 0.0;
    for (int i = 1; i < count; ++i) dd = std::max(dd, std::abs(f[i + 1] - 2 * f[i] + f[i - 1]));
    maxdd.push_back(dd);
  }
  double worst_factor = INFINITY;
  for (int l = 0; l + 1 < 4; ++l) worst_factor = std::min(worst_factor, maxdd[l] / maxdd[l + 1]);
  c.check("max second difference of f_4 shrinks by >= 1.5 per halving", 1.5 / worst_factor, 1.0,
          "smallest factor " + fmt(worst_factor));
}

// --------------------------------------------------------------- ensemble

void suite_ensemble(Context& c) {
  double norm_err = 0.0;
  for (int N : {1, 2, 5, 20})
    for (int j = 0; j <= N; ++j) {
      // 2 int_0^inf r^{2j+1} (1 + r^2)^{-N-2} dr with r = tan(theta).
      auto f = [N, j](double th) {
        const double r = std::tan(th);
        return 2.0 * std::pow(r, 2 * j + 1) * std::pow(std::cos(th), 2 * N + 4) / (std::cos(th) * std::cos(th));
      };
      norm_err = std::max(norm_err, rel(monomial_norm_sq(N, j), integrate(f, 0.0, std::numbers::pi / 2).value));
    }
  c.check("monomial norms match the radial integral", norm_err, 1e-10);

  std::map<std::vector<int>, int> freq;
  for (int i = 0; i < 100000; ++i) ++freq[sample_spectrum(2, 2, CounterRng::derive(c.opt.seed, i))];
  double worst_z = 0.0;
  const double sigma = std::sqrt(100000 * (1.0 / 3) * (2.0 / 3));
  for (const auto& [s, k] : freq) worst_z = std::max(worst_z, std::abs(k - 100000 / 3.0) / sigma);
  c.check("spectra uniform over the 3 subsets (N=2, n=2), max |z|",
          freq.size() == 3 ? worst_z : INFINITY, 3.0);

  {
    const FewnomialSample s{2, {0, 2}, {1.0, 1.0}};
    auto roots = nonzero_roots(s);
    std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) { return a.imag() < b.imag(); });
    const double err = roots.size() == 2 ? std::max(std::abs(roots[0] + Complex(0, 1)), std::abs(roots[1] - Complex(0, 1)))
                                         : INFINITY;
    c.check("z^2 + 1 has roots +-i", err, 1e-14);
  }

  int count_bad = 0;
  double residual = 0.0, scaling = 0.0;
  for (int i = 0; i < 200; ++i) {
    const int N = 20 + static_cast<int>(c.rng.below(200));
    const int n = 2 + static_cast<int>(c.rng.below(5));
    FewnomialSample s = sample_fewnomial(N, n, CounterRng::derive(c.opt.seed + 1, i));
    const RootReport r = find_nonzero_roots(s);
    if (static_cast<int>(r.roots.size()) != s.spectrum.back() - s.spectrum.front()) ++count_bad;
    residual = std::max(residual, r.max_residual);
    if (i < 3) {
      const Complex k = c.rng.complex_normal() * 1e3;
      for (auto& a : s.coeffs) a *= k;
      auto scaled = nonzero_roots(s);
      for (const Complex& z : scaled) {
        double best = INFINITY;
        for (const Complex& w : r.roots) best = std::min(best, std::abs(z - w) / std::abs(w));
        scaling = std::max(scaling, best);
      }
    }
  }
  c.check("root count equals span max S - min S", count_bad, 0);
  c.check("relative residual of polished roots", residual, 1e-8);
  c.check("roots invariant under scaling the coefficients", scaling, 1e-8);

  // Headline run: N = 200, n = 4, 2000 samples.
  const HistogramSpec spec{-6.0, 6.0, 24};
  const RadialHistogram hist = empirical_radial(200, 4, 2000, spec, c.opt.seed, c.opt.workers);
  c.check("root-finder failure rate", static_cast<double>(hist.failures) / hist.requested, 1e-3);
  c.check("total mass equals mean span / N", std::abs(hist.total_mass() - hist.mean_span_over_N()), 1e-15);
  const double exact = expected_span_exact(200, 4) / 200.0;
  c.check("total mass within 3 sigma of E[span]/N",
          std::abs(hist.total_mass() - exact) / hist.span_std_error_over_N(), 3.0,
          "mass " + fmt(hist.total_mass()) + " vs " + fmt(exact));
  int within = 0;
  const double width = (spec.rho_max - spec.rho_min) / spec.bins;
  const double scale = 1.0 / (static_cast<double>(hist.accepted) * hist.N * width);
  for (int b = 0; b < spec.bins; ++b) {
    const double lo = hist.edges[b], hi = hist.edges[b + 1];
    const double analytic = (F_grad(4, {c.analytic(RadialPoint{hi}).at(1)})(0) -
                             F_grad(4, {c.analytic(RadialPoint{lo}).at(1)})(0)) / width;
    // Floor the error with the Poisson value at the analytic expected count.
    const double sigma_b = std::max(hist.std_error[b], std::sqrt(analytic / scale) * scale);
    if (std::abs(hist.density[b] - analytic) <= 3.0 * sigma_b) ++within;
  }
  c.check("fraction of bins on |rho| <= 6 outside 3 sigma", 1.0 - static_cast<double>(within) / spec.bins, 0.05);
}

// ------------------------------------------------------------------- span

void suite_span(Context& c) {
  for (auto [N, n] : {std::pair{2, 2}, std::pair{10, 3}, std::pair{50, 4}}) {
    const double enumerated = expected_span_enumerate(N, n);
    const double grouped = expected_span_exact(N, n);
    const McEstimate mc = expected_span_mc(N, n, 200000, c.opt.seed);
    const std::string tag = "(N=" + std::to_string(N) + ", n=" + std::to_string(n) + ")";
    c.check("grouped count equals full enumeration " + tag, rel(grouped, enumerated), 1e-12,
            "enumeration " + fmt(enumerated) + ", Monte Carlo " + fmt(mc.value) + ", printed formula " +
                fmt(expected_span_formula(N, n)));
    c.check("Monte Carlo span within 4 sigma " + tag, std::abs(mc.value - enumerated) / mc.std_error, 4.0);
  }
  c.check("E[span] for N=2, n=2 is 4/3", std::abs(expected_span_exact(2, 2) - 4.0 / 3.0), 1e-15);
  double full = 0.0;
  for (int N : {1, 5, 30}) full = std::max(full, std::abs(expected_span_exact(N, N + 1) - N));
  c.check("full support gives span N", full, 1e-12);
  const double normalized = expected_span_exact(400, 4) / 400.0;
  c.check("E[span]/N at N=400, n=4 within 1% of 3/5", rel(normalized, 0.6), 1e-2, "value " + fmt(normalized));
}

using SuiteFn = void (*)(Context&);

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
  static const std::vector<std::pair<std::string, SuiteFn>> suites{
      {"simplex", suite_simplex},   {"potential", suite_potential},       {"boundary", suite_boundary},
      {"stilde", suite_stilde},     {"distribution", suite_distribution}, {"density", suite_density},
      {"ensemble", suite_ensemble}, {"span", suite_span}};
  return suites;
}

}  // namespace

const std::vector<std::string>& verify_suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, fn] : registry()) v.push_back(name);
    return v;
  }();
  return names;
}

std::vector<CheckResult> run_verify(const VerifyOptions& options,
                                    const std::function<void(const CheckResult&)>& on_result) {
  for (const std::string& s : options.suites) {
    const auto& names = verify_suite_names();
    if (std::find(names.begin(), names.end(), s) == names.end())
      throw std::invalid_argument("unknown verification suite '" + s + "'");
  }
  std::vector<CheckResult> results;
  std::uint64_t index = 0;
  for (const auto& [name, fn] : registry()) {
    ++index;
    if (!options.suites.empty() &&
        std::find(options.suites.begin(), options.suites.end(), name) == options.suites.end())
      continue;
    Context ctx{options, CounterRng(CounterRng::derive(options.seed, index)), results,
                on_result, name};
    try {
      fn(ctx);
    } catch (const std::exception& e) {
      ctx.check(std::string("suite raised: ") + e.what(), INFINITY, 0.0);
    }
  }
  return results;
}

}  // namespace fewnomial
