#pragma once

#include "fewnomial/simplex.hpp"

#include <memory>
#include <stdexcept>
#include <utility>

namespace fewnomial {

/// Root solve for h failed to reach tolerance within the iteration cap.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The pair (rho, x) indexing a line section of the potential.
struct PotentialParams {
  RadialPoint rho;
  BoundaryPoint x;
};

/// Values of B and its derivatives at the two ends of the segment.
struct BEndpointData {
  double bss0;       // B_ss(0) = sum (x_i - mu_i)^2 / mu_i
  double bmax;       // B(1) = b(x, rho)
  Vector brho1;      // lim_{s->1} B_rho = -(x - mu)
  Matrix brhorho1;   // lim_{s->1} B_rhorho = mu_{p,q}
};

/// Partial derivatives of B(s, rho, x). At s = 1 the entries B_s and B_ss
/// diverge and are reported as +infinity.
struct BDerivatives {
  double B_s;
  double B_ss;
  Vector B_rho;
  Vector B_rho_s;
  Matrix B_rhorho;
};

/// Partial derivatives of h(t, rho, x). At t = 0, h_t is +infinity while the
/// product h * h_t has a finite limit.
struct HDerivatives {
  double h_t;
  Vector h_rho;
  double h_times_ht;
};

/// Everything about rho that line sections share: mu, its first and second
/// derivatives, all in homogeneous indexing i = 0..m.
struct MomentState {
  explicit MomentState(const RadialPoint& rho);

  int m;
  Vector mu;                     // mu_0..mu_m
  Matrix jac;                    // (m+1) x m, mu_{i,p}
  std::vector<Matrix> second;    // mu_{i,pq}
  double log_partition;          // log(1 + |e^rho|)
  Vector rho;                    // rho_0 = 0, rho_1..rho_m
};

/// b restricted to the segment from mu(rho) to a boundary point x, i.e.
/// B(s) = b((1-s) mu + s x, rho). Written as a relative entropy so that the
/// small-s behaviour B ~ s^2 is computed without cancellation.
class LineSection {
 public:
  LineSection(std::shared_ptr<const MomentState> state, Vector x);

  double value(double s) const;
  /// (B, B_s) sharing one pass over the coordinates.
  std::pair<double, double> value_and_slope(double s) const;
  double slope(double s) const;
  double curvature(double s) const;
  Vector rho_gradient(double s) const;
  Vector rho_slope(double s) const;
  Matrix rho_hessian(double s) const;

  /// b(x, rho) = B(1).
  double top() const noexcept { return top_; }
  /// True when t is at or above top() up to the rounding error of top() itself.
  /// Below the top h_rho decays only like 1 / |log(1 - h)|, so a t that
  /// undershoots by a few ulps would otherwise report h_rho of order 0.05.
  bool reaches_top(double t) const noexcept;
  /// B_ss(0) = sum (x_i - mu_i)^2 / mu_i.
  double curvature_at_zero() const noexcept { return bss0_; }

  /// h(t): 0 for t <= 0, 1 when reaches_top(t), else the root of B(s) = t.
  double solve(double t) const;

  const Vector& x() const noexcept { return x_; }
  const MomentState& state() const noexcept { return *state_; }

 private:
  std::shared_ptr<const MomentState> state_;
  Vector x_;
  Vector diff_;   // x_i - mu_i
  Vector ratio_;  // (x_i - mu_i) / mu_i
  double top_;
  double bss0_;
};

double b_eval(const SimplexPoint& lambda, const RadialPoint& rho);
/// Maximum of b(., rho) over the simplex, attained at a vertex.
double b_max(const RadialPoint& rho);

double B_eval(double s, const PotentialParams& params);
BDerivatives B_derivatives(double s, const PotentialParams& params);
BEndpointData B_endpoint_data(const PotentialParams& params);

double solve_h(double t, const PotentialParams& params);
HDerivatives h_derivatives(double t, const PotentialParams& params);

/// m = 1 only. For the boundary point x in {0, 1} returns s~ with
/// B(s, rho, x) = B(s~, rho, 1 - x).
double stilde(double s, double rho, int x = 0);

}  // namespace fewnomial
