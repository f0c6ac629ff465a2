#pragma once

#include "fewnomial/distribution.hpp"
#include "fewnomial/quadrature.hpp"

#include <vector>

namespace fewnomial {

/// Largest n accepted by the evaluators below.
constexpr int kMaxN = 512;

/// Knobs shared by the G/F evaluators.
struct DensityOptions {
  int order = 0;  // facet subdivisions per edge; 0 selects default_density_order(m)
  QuadratureTolerance tol{1e-14, 1e-12, 20000};
  unsigned workers = 1;  // threads used inside one Hessian evaluation
};

/// G_n(rho) = integral over [0, b_max] of (1 - D(t, rho))^n dt.
double G_eval(int n, const RadialPoint& rho, const DensityOptions& opt = {});
/// F_n(rho) = log(1 + |e^rho|) - G_n(rho).
double F_eval(int n, const RadialPoint& rho, const DensityOptions& opt = {});
Vector G_grad(int n, const RadialPoint& rho, const DensityOptions& opt = {});
/// Second derivatives of G_n from the fixed-domain form of the integrand.
Matrix G_hessian(int n, const RadialPoint& rho, const DensityOptions& opt = {});

Vector F_grad(int n, const RadialPoint& rho, const DensityOptions& opt = {});
Matrix F_hessian(int n, const RadialPoint& rho, const DensityOptions& opt = {});

/// Gradient and Hessian of log(1 + |e^rho|): mu and mu_{p,q}.
Vector log_partition_gradient(const RadialPoint& rho);
Matrix log_partition_hessian(const RadialPoint& rho);

/// m = 1: f_n(rho) = d^2 F_n / d rho^2.
double radial_density(int n, double rho, const DensityOptions& opt = {});
/// [(1 + e^rho)(1 + e^-rho)]^-1.
double fs_density(double rho);
/// m! det(Hess F_n / 2 pi).
double kk_density(int n, const RadialPoint& rho, const DensityOptions& opt = {});
/// m! det(Hess log(1 + |e^rho|) / 2 pi), the full-ensemble reference.
double fs_kk_density(const RadialPoint& rho);

struct Rational {
  long num;
  long den;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};
/// (n - 1)/(n + 1) in lowest terms.
Rational expected_mass(int n);

/// Richardson-extrapolated central differences (step h and h/2).
Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x, double h);
Matrix fd_hessian(const std::function<double(const Vector&)>& f, const Vector& x, double h);
Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& x, double h);

struct DensityTable {
  int n;
  int m;
  std::vector<RadialPoint> grid;
  std::vector<double> F;
  std::vector<Vector> grad;
  std::vector<Matrix> hess;
  std::vector<double> density;     // d2F for m = 1, m! det(Hess/2 pi) otherwise
  std::vector<double> fs_density;
};

/// Evaluates every grid point, in parallel over points.
DensityTable density_table(int n, const std::vector<RadialPoint>& grid,
                           const DensityOptions& opt = {}, unsigned workers = 0);

}  // namespace fewnomial
