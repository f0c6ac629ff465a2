#include "fewnomial/density.hpp"

#include "fewnomial/parallel.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace fewnomial {
namespace {

void check_n(int n) {
  if (n < 1 || n > kMaxN) throw std::invalid_argument("n must lie in [1, 512]");
}

// (1 - D)^k in log space; 0^0 = 1.
double survival_pow(double D, int k) {
  if (k == 0) return 1.0;
  if (D >= 1.0) return 0.0;
  return std::exp(k * std::log1p(-D));
}

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

// Breakpoints of the u = sqrt(t) integrals.
std::vector<double> u_breaks(const FacetModel& model) {
  std::vector<double> out;
  out.reserve(model.kinks().size());
  for (double t : model.kinks()) out.push_back(std::sqrt(t));
  return out;
}

long factorial(int m) {
  long f = 1;
  for (int i = 2; i <= m; ++i) f *= i;
  return f;
}

}  // namespace

double G_eval(int n, const RadialPoint& rho, const DensityOptions& opt) {
  check_n(n);
  const FacetModel model(rho, opt.order > 0 ? opt.order : default_density_order(rho.dim()));
  // t = u^2 removes the square-root onset of D at t = 0.
  auto integrand = [&](double u) {
    return 2.0 * u * survival_pow(model.value(u * u), n);
  };
  return integrate(integrand, 0.0, std::sqrt(model.b_max()), u_breaks(model), opt.tol).value;
}

double F_eval(int n, const RadialPoint& rho, const DensityOptions& opt) {
  return log_partition(rho) - G_eval(n, rho, opt);
}

Vector G_grad(int n, const RadialPoint& rho, const DensityOptions& opt) {
  check_n(n);
  const FacetModel model(rho, opt.order > 0 ? opt.order : default_density_order(rho.dim()));
  const int m = model.m();
  auto integrand = [&](double u) -> Vector {
    const double t = u * u;
    const auto h = model.solve_all(t);
    const double D = model.value_from(h);
    return (-2.0 * u * n * survival_pow(D, n - 1)) * model.drho_from(t, h);
  };
  return integrate_vector(integrand, m, 0.0, std::sqrt(model.b_max()), u_breaks(model), opt.tol).value;
}

Matrix G_hessian(int n, const RadialPoint& rho, const DensityOptions& opt) {
  check_n(n);
  const FacetModel model(rho, opt.order > 0 ? opt.order : default_density_order(rho.dim()));
  const MomentState& st = model.state();
  const int m = model.m();
  const auto& nodes = model.nodes();

  // Node part: for each node k, T_p and d_q T_p as integrals over the segment
  // parameter s, packed as [T_1..T_m, dT_{1,1}, dT_{2,1}, ..] (column-major q).
  std::vector<Vector> node_terms(nodes.size());
  parallel_for(nodes.size(), std::max(1u, opt.workers), [&](std::size_t k) {
    const LineSection& line = nodes[k].line;
    std::vector<double> breaks;
    for (double top : model.kinks())
      if (top < line.top()) breaks.push_back(line.solve(top));
    auto integrand = [&](double s) -> Vector {
      Vector out = Vector::Zero(m + m * m);
      if (s <= 0.0) return out;
      const double t = line.value(s);
      if (!(t > 0.0)) return out;
      const auto h = model.solve_all(t);
      const double D = model.value_from(h);
      const double w1 = survival_pow(D, n - 1);
      const double w2 = n >= 2 ? (n - 1) * survival_pow(D, n - 2) : 0.0;
      const double sm = ipow(s, m - 1);
      const Vector Bp = line.rho_gradient(s);
      out.head(m) = -sm * w1 * Bp;
      if (w1 == 0.0 && w2 == 0.0) return out;
      const Matrix Bpq = line.rho_hessian(s);
      const Vector Dq = model.drho_from(t, h);
      const double Dt = model.dt_from(t, h);
      // Column q: (n-1)(1-D)^{n-2} (D_t B_q + D_q) B_p - (1-D)^{n-1} B_pq.
      Matrix dT = -w1 * Bpq;
      if (w2 != 0.0) dT += w2 * Bp * (Dt * Bp + Dq).transpose();
      out.tail(m * m) = sm * Eigen::Map<const Vector>(dT.data(), m * m);
      return out;
    };
    node_terms[k] = integrate_vector(integrand, m + m * m, 0.0, 1.0, breaks, opt.tol).value;
  });

  Matrix H = Matrix::Zero(m, m);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const int i = nodes[k].facet;
    const Vector T = node_terms[k].head(m);
    const Eigen::Map<const Matrix> dT(node_terms[k].data() + m, m, m);
    for (int q = 0; q < m; ++q)
      H.col(q) += nodes[k].weight * (st.jac(i, q) * T + st.mu(i) * dT.col(q));
  }
  H *= -static_cast<double>(n) * m;

  // Remaining part through S~_p = sum_k w_k mu_{i,p} h_k^m, integrated in u.
  auto integrand = [&](double u) -> Vector {
    const double t = u * u;
    Vector out = Vector::Zero(m * m);
    if (t <= 0.0) return out;
    const auto h = model.solve_all(t);
    const double D = model.value_from(h);
    const double w1 = n * survival_pow(D, n - 1);
    const double w2 = n >= 2 ? n * (n - 1.0) * survival_pow(D, n - 2) : 0.0;
    Vector Sp = Vector::Zero(m);
    Matrix Spq = Matrix::Zero(m, m);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const int i = nodes[k].facet;
      const double w = nodes[k].weight;
      const double hm = ipow(h[k], m);
      const Vector jac_i = st.jac.row(i).transpose();
      Sp += w * hm * jac_i;
      Spq += w * hm * st.second[i];
      if (h[k] < 1.0) {
        const Vector h_rho = -nodes[k].line.rho_gradient(h[k]) / nodes[k].line.slope(h[k]);
        Spq += (w * m * ipow(h[k], m - 1)) * jac_i * h_rho.transpose();
      }
    }
    Matrix C = w1 * Spq;
    if (w2 != 0.0) C -= w2 * Sp * model.drho_from(t, h).transpose();
    out = 2.0 * u * Eigen::Map<const Vector>(C.data(), m * m);
    return out;
  };
  const Vector C = integrate_vector(integrand, m * m, 0.0, std::sqrt(model.b_max()), u_breaks(model), opt.tol).value;
  H -= Eigen::Map<const Matrix>(C.data(), m, m);
  return H;
}

Vector log_partition_gradient(const RadialPoint& rho) { return moment_map(rho).values(); }

Matrix log_partition_hessian(const RadialPoint& rho) {
  return moment_jacobian(rho).bottomRows(rho.dim());
}

Vector F_grad(int n, const RadialPoint& rho, const DensityOptions& opt) {
  return log_partition_gradient(rho) - G_grad(n, rho, opt);
}

Matrix F_hessian(int n, const RadialPoint& rho, const DensityOptions& opt) {
  return log_partition_hessian(rho) - G_hessian(n, rho, opt);
}

double radial_density(int n, double rho, const DensityOptions& opt) {
  const RadialPoint r{rho};
  return F_hessian(n, r, opt)(0, 0);
}

double fs_density(double rho) {
  // 1 / ((1 + e^r)(1 + e^-r)) = e^{-|r|} / (1 + e^{-|r|})^2
  const double e = std::exp(-std::abs(rho));
  return e / ((1.0 + e) * (1.0 + e));
}

double kk_density(int n, const RadialPoint& rho, const DensityOptions& opt) {
  const int m = rho.dim();
  return factorial(m) * (F_hessian(n, rho, opt) / (2.0 * std::numbers::pi)).determinant();
}

double fs_kk_density(const RadialPoint& rho) {
  const int m = rho.dim();
  return factorial(m) * (log_partition_hessian(rho) / (2.0 * std::numbers::pi)).determinant();
}

Rational expected_mass(int n) {
  if (n < 1) throw std::invalid_argument("expected_mass: n must be positive");
  const long num = n - 1;
  const long den = n + 1;
  const long g = std::gcd(num, den);
  return {num / g, den / g};
}

Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x, double h) {
  Vector g(x.size());
  for (int p = 0; p < x.size(); ++p) {
    auto central = [&](double step) {
      Vector xp = x, xm = x;
      xp(p) += step;
      xm(p) -= step;
      return (f(xp) - f(xm)) / (2.0 * step);
    };
    g(p) = (4.0 * central(0.5 * h) - central(h)) / 3.0;
  }
  return g;
}

Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& x, double h) {
  const Vector f0 = f(x);
  Matrix J(f0.size(), x.size());
  for (int q = 0; q < x.size(); ++q) {
    auto central = [&](double step) -> Vector {
      Vector xp = x, xm = x;
      xp(q) += step;
      xm(q) -= step;
      return (f(xp) - f(xm)) / (2.0 * step);
    };
    J.col(q) = (4.0 * central(0.5 * h) - central(h)) / 3.0;
  }
  return J;
}

Matrix fd_hessian(const std::function<double(const Vector&)>& f, const Vector& x, double h) {
  const int m = static_cast<int>(x.size());
  const double f0 = f(x);
  auto at = [&](int p, double a, int q, double b) {
    Vector y = x;
    y(p) += a;
    y(q) += b;
    return f(y);
  };
  auto second = [&](int p, int q, double step) {
    if (p == q) return (at(p, step, p, 0.0) - 2.0 * f0 + at(p, -step, p, 0.0)) / (step * step);
    return (at(p, step, q, step) - at(p, step, q, -step) - at(p, -step, q, step) +
            at(p, -step, q, -step)) / (4.0 * step * step);
  };
  Matrix H(m, m);
  for (int p = 0; p < m; ++p)
    for (int q = p; q < m; ++q) {
      H(p, q) = (4.0 * second(p, q, 0.5 * h) - second(p, q, h)) / 3.0;
      H(q, p) = H(p, q);
    }
  return H;
}

DensityTable density_table(int n, const std::vector<RadialPoint>& grid,
                           const DensityOptions& opt, unsigned workers) {
  check_n(n);
  if (grid.empty()) throw std::invalid_argument("density_table: empty grid");
  const int m = grid.front().dim();
  DensityTable table{n, m, grid, {}, {}, {}, {}, {}};
  const std::size_t count = grid.size();
  table.F.resize(count);
  table.grad.resize(count);
  table.hess.resize(count);
  table.density.resize(count);
  table.fs_density.resize(count);
  if (workers == 0) workers = default_workers();
  parallel_for(count, workers, [&](std::size_t i) {
    const RadialPoint& r = grid[i];
    if (r.dim() != m) throw std::invalid_argument("density_table: mixed dimensions");
    table.F[i] = F_eval(n, r, opt);
    table.grad[i] = F_grad(n, r, opt);
    table.hess[i] = F_hessian(n, r, opt);
    if (m == 1) {
      table.density[i] = table.hess[i](0, 0);
      table.fs_density[i] = fs_density(r.at(1));
    } else {
      table.density[i] = factorial(m) * (table.hess[i] / (2.0 * std::numbers::pi)).determinant();
      table.fs_density[i] = fs_kk_density(r);
    }
  });
  return table;
}

}  // namespace fewnomial
