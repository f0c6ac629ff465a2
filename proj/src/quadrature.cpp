#include "fewnomial/quadrature.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <exception>
#include <memory>
#include <queue>

namespace fewnomial {
namespace {

struct Workspace {
  explicit Workspace(std::size_t n) : ptr(gsl_integration_workspace_alloc(n)) {
    if (!ptr) throw std::bad_alloc();
  }
  ~Workspace() { gsl_integration_workspace_free(ptr); }
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;
  gsl_integration_workspace* ptr;
};

struct Trampoline {
  const std::function<double(double)>* f;
  std::exception_ptr error;
};

double call(double x, void* params) {
  auto* tr = static_cast<Trampoline*>(params);
  if (tr->error) return 0.0;
  try {
    return (*tr->f)(x);
  } catch (...) {
    tr->error = std::current_exception();
    return 0.0;
  }
}

// GSL aborts by default; errors are reported through return codes here.
const bool gsl_handler_disabled = [] {
  gsl_set_error_handler_off();
  return true;
}();

std::vector<double> partition(double a, double b, std::vector<double> breakpoints) {
  std::vector<double> pts{a};
  std::sort(breakpoints.begin(), breakpoints.end());
  const double min_gap = 64.0 * 2.2e-16 * std::max(std::abs(a), std::abs(b));
  for (double p : breakpoints) {
    if (!(p > a && p < b)) continue;
    if (p - pts.back() <= min_gap) continue;
    pts.push_back(p);
  }
  if (b - pts.back() <= min_gap && pts.size() > 1) pts.pop_back();
  pts.push_back(b);
  return pts;
}

struct Panel {
  double a, b;
  Eigen::VectorXd value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

// 21-point Kronrod extension of the 10-point Gauss rule, with the QUADPACK
// error scaling applied per component.
Panel kronrod21(const std::function<Eigen::VectorXd(double)>& f, int dim, double a, double b) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
  using G = boost::math::quadrature::gauss<double, 10>;
  const auto& x = GK::abscissa();
  const auto& wk = GK::weights();
  const auto& wg = G::weights();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);

  std::vector<Eigen::VectorXd> fp(x.size()), fm(x.size());
  Eigen::VectorXd kron = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd gauss = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd absint = Eigen::VectorXd::Zero(dim);
  fp[0] = f(c);
  kron += wk[0] * fp[0];
  absint += wk[0] * fp[0].cwiseAbs();
  for (std::size_t i = 1; i < x.size(); ++i) {
    fp[i] = f(c + h * x[i]);
    fm[i] = f(c - h * x[i]);
    kron += wk[i] * (fp[i] + fm[i]);
    absint += wk[i] * (fp[i].cwiseAbs() + fm[i].cwiseAbs());
    if (i % 2 == 1) gauss += wg[i / 2] * (fp[i] + fm[i]);
  }
  const Eigen::VectorXd mean = 0.5 * kron;
  Eigen::VectorXd asc = wk[0] * (fp[0] - mean).cwiseAbs();
  for (std::size_t i = 1; i < x.size(); ++i)
    asc += wk[i] * ((fp[i] - mean).cwiseAbs() + (fm[i] - mean).cwiseAbs());

  double err = 0.0;
  for (int j = 0; j < dim; ++j) {
    double e = std::abs((kron(j) - gauss(j)) * h);
    const double resasc = asc(j) * std::abs(h);
    const double resabs = absint(j) * std::abs(h);
    if (resasc != 0.0 && e != 0.0) e = resasc * std::min(1.0, std::pow(200.0 * e / resasc, 1.5));
    if (resabs > 2.0e-290) e = std::max(e, 50.0 * 2.2e-16 * resabs);
    err = std::max(err, e);
  }
  return {a, b, kron * h, err};
}

}  // namespace

VectorQuadratureResult integrate_vector(
    const std::function<Eigen::VectorXd(double)>& f, int dim, double a, double b,
    std::vector<double> breakpoints, const QuadratureTolerance& tol) {
  VectorQuadratureResult out{Eigen::VectorXd::Zero(dim), 0.0};
  if (!(a < b)) {
    if (a == b) return out;
    throw std::invalid_argument("integrate_vector: require a <= b");
  }
  const auto pts = partition(a, b, std::move(breakpoints));
  std::priority_queue<Panel> panels;
  Eigen::VectorXd total = Eigen::VectorXd::Zero(dim);
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    Panel p = kronrod21(f, dim, pts[i], pts[i + 1]);
    total += p.value;
    error += p.error;
    panels.push(std::move(p));
  }
  auto target = [&] { return std::max(tol.abs, tol.rel * total.cwiseAbs().maxCoeff()); };
  while (error > target() && panels.size() < tol.max_intervals) {
    Panel worst = panels.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;
    panels.pop();
    Panel left = kronrod21(f, dim, worst.a, mid);
    Panel right = kronrod21(f, dim, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(std::move(left));
    panels.push(std::move(right));
  }
  // Re-sum from the panels to shed the drift of the running updates.
  total.setZero();
  error = 0.0;
  while (!panels.empty()) {
    total += panels.top().value;
    error += panels.top().error;
    panels.pop();
  }
  out.value = total;
  out.abs_error = error;
  if (error > 1e3 * target()) {
    QuadratureResult best{total.cwiseAbs().maxCoeff(), error};
    throw QuadratureError("integrate_vector: tolerance not reached", best);
  }
  return out;
}

QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, std::vector<double> breakpoints,
                           const QuadratureTolerance& tol) {
  (void)gsl_handler_disabled;
  if (!(a < b)) {
    if (a == b) return {};
    throw std::invalid_argument("integrate: require a <= b");
  }
  auto pts = partition(a, b, std::move(breakpoints));
  Trampoline tr{&f, nullptr};
  gsl_function gf{&call, &tr};
  Workspace ws(tol.max_intervals);
  QuadratureResult out;
  int status = gsl_integration_qagp(&gf, pts.data(), pts.size(), tol.abs,
                                    tol.rel, tol.max_intervals, ws.ptr,
                                    &out.value, &out.abs_error);
  if (tr.error) std::rethrow_exception(tr.error);
  if (status == GSL_ETOL || status == GSL_EROUND) {
    // Roundoff-limited: accept when the achieved error is still tiny.
    if (out.abs_error <= std::max(1e3 * tol.abs, 1e3 * tol.rel * std::abs(out.value)))
      return out;
  }
  if (status != GSL_SUCCESS) {
    throw QuadratureError(std::string("integrate: ") + gsl_strerror(status), out);
  }
  return out;
}

}  // namespace fewnomial
