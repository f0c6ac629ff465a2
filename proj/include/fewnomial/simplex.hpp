#pragma once

#include <Eigen/Dense>

#include <initializer_list>
#include <vector>

namespace fewnomial {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Log-square-moduli rho = (log|z_1|^2, ..., log|z_m|^2) on (C*)^m. The
/// implicit coordinate rho_0 is 0.
class RadialPoint {
 public:
  explicit RadialPoint(Vector rho);
  RadialPoint(std::initializer_list<double> rho);

  int dim() const noexcept { return static_cast<int>(rho_.size()); }
  const Vector& values() const noexcept { return rho_; }
  /// rho_p for p = 1..m; rho_0 = 0.
  double at(int p) const { return p == 0 ? 0.0 : rho_(p - 1); }
  /// (rho_0, rho_1, ..., rho_m).
  Vector homogeneous() const;

 private:
  Vector rho_;
};

/// A point lambda of the closed unit simplex in R^m, with the derived
/// coordinate lambda_0 = 1 - |lambda|.
class SimplexPoint {
 public:
  /// Throws std::invalid_argument if lambda is outside the simplex by more
  /// than 1e-14.
  explicit SimplexPoint(Vector lambda);
  /// From (lambda_0, ..., lambda_m); the entries must sum to 1.
  static SimplexPoint from_homogeneous(const Vector& full);

  int dim() const noexcept { return static_cast<int>(lambda_.size()); }
  const Vector& values() const noexcept { return lambda_; }
  double lambda0() const noexcept { return lambda0_; }
  double at(int i) const { return i == 0 ? lambda0_ : lambda_(i - 1); }
  Vector homogeneous() const;

 private:
  SimplexPoint(Vector lambda, double lambda0) : lambda_(std::move(lambda)), lambda0_(lambda0) {}
  Vector lambda_;
  double lambda0_;
};

/// Point of the facet {lambda_facet = 0} of the simplex.
struct BoundaryPoint {
  int facet;
  SimplexPoint coords;

  /// Validates that coordinate `facet` vanishes.
  BoundaryPoint(int facet, SimplexPoint coords);
  /// Vertex v_i (lambda_i = 1); it lies on every facet j != i, tagged `facet`.
  static BoundaryPoint vertex(int m, int i, int facet);
};

/// Quadrature rule for the normalized facet measure dx_(i) (total mass 1).
struct FacetRule {
  int facet;
  std::vector<BoundaryPoint> nodes;
  std::vector<double> weights;
};

/// log(1 + |e^rho|), evaluated without overflow.
double log_partition(const RadialPoint& rho);

/// mu(rho) = e^rho / (1 + |e^rho|); strictly interior.
SimplexPoint moment_map(const RadialPoint& rho);

/// (m+1) x m matrix with entries mu_{i,p} = delta_ip mu_i - mu_i mu_p for
/// i = 0..m, p = 1..m (column p-1).
Matrix moment_jacobian(const RadialPoint& rho);

/// Second derivatives mu_{i,pq}; element i is the m x m matrix for mu_i.
std::vector<Matrix> moment_second_derivatives(const RadialPoint& rho);

/// Composite rule on facet `facet` of the m-simplex with `order` subdivisions
/// per edge. Facets of dimension 1 and 2 use degree-5 rules on each piece;
/// higher-dimensional facets use the centroid rule on a uniform subdivision.
FacetRule facet_rule(int m, int facet, int order);

/// Rules for all m+1 facets.
std::vector<FacetRule> facet_rules(int m, int order);

/// Polynomial degree integrated exactly by facet_rule for this m.
int facet_rule_degree(int m);

}  // namespace fewnomial
