#include "fewnomial/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fewnomial {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxNewton = 200;

// phi(u) = (1+u) log(1+u) - u, so that mu * phi(lambda/mu - 1) is one term of
// the relative entropy sum lambda log(lambda/mu) - lambda + mu.
double phi(double u, double log1pu) {
  if (std::abs(u) < 0.1) {
    double term = u * u;
    double sum = 0.0;
    for (int k = 2; k < 20; ++k) {
      sum += term / (k * (k - 1.0));
      term *= -u;
    }
    return sum;
  }
  if (u == -1.0) return 1.0;
  return (1.0 + u) * log1pu - u;
}

// psi(u) = u - log(1+u)
double psi(double u) {
  if (std::abs(u) < 0.1) {
    double term = u * u;
    double sum = 0.0;
    for (int k = 2; k < 20; ++k) {
      sum += term / k;
      term *= -u;
    }
    return sum;
  }
  return u - std::log1p(u);
}

void check_s(double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw std::domain_error("B: s must lie in [0, 1]");
}

}  // namespace

MomentState::MomentState(const RadialPoint& rho)
    : m(rho.dim()),
      mu(moment_map(rho).homogeneous()),
      jac(moment_jacobian(rho)),
      second(moment_second_derivatives(rho)),
      log_partition(fewnomial::log_partition(rho)),
      rho(rho.homogeneous()) {}

LineSection::LineSection(std::shared_ptr<const MomentState> state, Vector x)
    : state_(std::move(state)), x_(std::move(x)) {
  const Vector& mu = state_->mu;
  diff_ = x_ - mu;
  ratio_ = diff_.cwiseQuotient(mu);
  bss0_ = diff_.cwiseProduct(ratio_).sum();
  top_ = value(1.0);
  // At a vertex use the same expression as b_max, so that t = b_max clamps
  // exactly instead of landing one rounding step below the top.
  for (int i = 0; i <= state_->m; ++i)
    if (x_(i) == 1.0) top_ = state_->log_partition - state_->rho(i);
}

std::pair<double, double> LineSection::value_and_slope(double s) const {
  const Vector& mu = state_->mu;
  double B = 0.0;
  double Bs = 0.0;
  for (int j = 0; j <= state_->m; ++j) {
    const double u = s * ratio_(j);
    const double l = std::log1p(u);
    B += mu(j) * phi(u, l);
    if (diff_(j) != 0.0) Bs += diff_(j) * l;
  }
  return {B, Bs};
}

double LineSection::value(double s) const { return value_and_slope(s).first; }

double LineSection::slope(double s) const {
  if (s >= 1.0) return kInf;
  return value_and_slope(s).second;
}

double LineSection::curvature(double s) const {
  if (s >= 1.0) return kInf;
  const Vector& mu = state_->mu;
  double sum = 0.0;
  for (int j = 0; j <= state_->m; ++j) {
    const double lam = (1.0 - s) * mu(j) + s * x_(j);
    sum += diff_(j) * diff_(j) / lam;
  }
  return sum;
}

Vector LineSection::rho_gradient(double s) const {
  const int m = state_->m;
  const Matrix& jac = state_->jac;
  if (s >= 1.0) return -diff_.tail(m);
  Vector g = -s * s * diff_.tail(m);
  if (s == 0.0) return g;
  for (int j = 0; j <= m; ++j) {
    const double w = (1.0 - s) * psi(s * ratio_(j));
    g -= w * jac.row(j).transpose();
  }
  return g;
}

Vector LineSection::rho_slope(double s) const {
  const int m = state_->m;
  const Matrix& jac = state_->jac;
  const Vector& mu = state_->mu;
  if (s >= 1.0) {
    // Diverges through the log terms unless every x_j > 0; report the sentinel.
    return Vector::Constant(m, std::numeric_limits<double>::quiet_NaN());
  }
  Vector g = -2.0 * s * diff_.tail(m);
  if (s == 0.0) return g;
  for (int j = 0; j <= m; ++j) {
    const double lam = (1.0 - s) * mu(j) + s * x_(j);
    const double w = psi(s * ratio_(j)) - s * (1.0 - s) * diff_(j) * diff_(j) / (mu(j) * lam);
    g += w * jac.row(j).transpose();
  }
  return g;
}

Matrix LineSection::rho_hessian(double s) const {
  const int m = state_->m;
  const Matrix& jac = state_->jac;
  const Vector& mu = state_->mu;
  const Matrix mu_pq = jac.bottomRows(m);
  if (s >= 1.0) return mu_pq;
  if (s == 0.0) return Matrix::Zero(m, m);
  Matrix H = (2.0 * s - 1.0) * mu_pq;
  const double c = (1.0 - s);
  for (int j = 0; j <= m; ++j) {
    const double lam = c * mu(j) + s * x_(j);
    H += (c * c / lam) * jac.row(j).transpose() * jac.row(j);
    H += c * std::log1p(s * ratio_(j)) * state_->second[j];
  }
  return H;
}

bool LineSection::reaches_top(double t) const noexcept {
  return t >= top_ - 8 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(top_));
}

double LineSection::solve(double t) const {
  if (!(t > 0.0)) return 0.0;
  if (reaches_top(t)) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  double s = std::sqrt(2.0 * t / bss0_);
  if (!(s < 1.0)) s = 0.5;
  for (int iter = 0; iter < kMaxNewton; ++iter) {
    const auto [B, Bs] = value_and_slope(s);
    const double f = B - t;
    if (f == 0.0) return s;
    (f > 0.0 ? hi : lo) = s;
    double next = s - f / Bs;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - s);
    s = next;
    if (step <= 2e-16 * s || hi - lo <= 4e-16 * hi) break;
  }
  const double residual = std::abs(value(s) - t);
  if (!(residual <= 1e-12 * std::max(1.0, t))) {
    std::ostringstream msg;
    msg << "solve_h: no convergence (t=" << t << ", s=" << s << ", residual=" << residual << ")";
    throw ConvergenceError(msg.str());
  }
  return s;
}

double b_eval(const SimplexPoint& lambda, const RadialPoint& rho) {
  if (lambda.dim() != rho.dim()) throw std::invalid_argument("b_eval: dimension mismatch");
  auto state = std::make_shared<const MomentState>(rho);
  // b(lambda) = B(1) on the segment from mu to lambda.
  const Vector& mu = state->mu;
  const Vector lam = lambda.homogeneous();
  double sum = 0.0;
  for (int j = 0; j <= state->m; ++j) {
    // 0 log 0 = 0: a vanishing coordinate contributes mu_j * phi(-1) = mu_j.
    const double u = (lam(j) - mu(j)) / mu(j);
    sum += mu(j) * phi(u, std::log1p(u));
  }
  return sum;
}

double b_max(const RadialPoint& rho) {
  double lowest = 0.0;
  for (int p = 1; p <= rho.dim(); ++p) lowest = std::min(lowest, rho.at(p));
  return log_partition(rho) - lowest;
}

namespace {
LineSection section(const PotentialParams& params) {
  if (params.x.coords.dim() != params.rho.dim()) throw std::invalid_argument("PotentialParams: dimension mismatch");
  return LineSection(std::make_shared<const MomentState>(params.rho), params.x.coords.homogeneous());
}
}  // namespace

double B_eval(double s, const PotentialParams& params) {
  check_s(s);
  return section(params).value(s);
}

BDerivatives B_derivatives(double s, const PotentialParams& params) {
  check_s(s);
  const auto line = section(params);
  BDerivatives out;
  out.B_s = s == 0.0 ? 0.0 : line.slope(s);
  out.B_ss = s == 0.0 ? line.curvature_at_zero() : line.curvature(s);
  out.B_rho = line.rho_gradient(s);
  out.B_rho_s = s >= 1.0 ? Vector::Constant(params.rho.dim(), kInf) : line.rho_slope(s);
  out.B_rhorho = line.rho_hessian(s);
  return out;
}

BEndpointData B_endpoint_data(const PotentialParams& params) {
  const auto line = section(params);
  return {line.curvature_at_zero(), line.top(), line.rho_gradient(1.0), line.rho_hessian(1.0)};
}

double solve_h(double t, const PotentialParams& params) {
  if (!(t >= 0.0)) throw std::domain_error("solve_h: t must be nonnegative");
  return section(params).solve(t);
}

HDerivatives h_derivatives(double t, const PotentialParams& params) {
  if (!(t >= 0.0)) throw std::domain_error("h_derivatives: t must be nonnegative");
  const auto line = section(params);
  const int m = params.rho.dim();
  if (t == 0.0) return {kInf, Vector::Zero(m), 1.0 / line.curvature_at_zero()};
  if (line.reaches_top(t)) return {0.0, Vector::Zero(m), 0.0};
  const double s = line.solve(t);
  const double Bs = line.slope(s);
  return {1.0 / Bs, -line.rho_gradient(s) / Bs, s / Bs};
}

double stilde(double s, double rho, int x) {
  if (x != 0 && x != 1) throw std::invalid_argument("stilde: x must be 0 or 1");
  if (!(s >= 0.0 && s <= 1.0)) throw std::domain_error("stilde: s must lie in [0, 1]");
  const RadialPoint r{rho};
  auto state = std::make_shared<const MomentState>(r);
  // Homogeneous coordinates (x_0, x_1) = (1 - x, x).
  const LineSection from(state, (Vector(2) << 1.0 - x, static_cast<double>(x)).finished());
  const LineSection to(state, (Vector(2) << static_cast<double>(x), 1.0 - x).finished());
  const double t = from.value(s);
  if (t > std::min(from.top(), to.top()))
    throw std::domain_error("stilde: s beyond the range where both branches are defined");
  return to.solve(t);
}

}  // namespace fewnomial
