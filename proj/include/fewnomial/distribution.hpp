#pragma once

#include "fewnomial/potential.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace fewnomial {

/// Facet subdivisions per edge used when a caller does not choose one.
int default_facet_order(int m);
/// Coarser default used for gradients and Hessians of F, whose cost grows
/// with the cube of the node count.
int default_density_order(int m);

/// D(t, rho) together with its first partial derivatives.
struct DistEval {
  double t;
  RadialPoint rho;
  double value;
  double dt;     // +infinity at t = 0 when m = 1
  Vector drho;
};

/// D(t, rho) = sum_i mu_i * integral over facet i of h(t, rho, x)^m, with the
/// facet integrals replaced by a fixed quadrature rule. All derivatives are
/// derivatives of this discretized sum, so they agree with finite differences
/// of value() to rounding.
class FacetModel {
 public:
  struct Node {
    int facet;
    double weight;       // facet rule weight
    double coefficient;  // mu_facet * weight
    LineSection line;
  };

  FacetModel(const RadialPoint& rho, int order);

  int m() const noexcept { return state_->m; }
  const RadialPoint& rho() const noexcept { return rho_; }
  const MomentState& state() const noexcept { return *state_; }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  double b_max() const noexcept { return b_max_; }
  /// The values b(x_k, rho) at which D loses smoothness in t, sorted.
  const std::vector<double>& kinks() const noexcept { return kinks_; }

  /// h(t, x_k) for every node.
  std::vector<double> solve_all(double t) const;

  double value(double t) const;
  double dt(double t) const;
  Vector drho(double t) const;
  DistEval eval(double t) const;

  /// D, D_t and D_rho from precomputed node values h_k = solve_all(t).
  double value_from(const std::vector<double>& h) const;
  double dt_from(double t, const std::vector<double>& h) const;
  Vector drho_from(double t, const std::vector<double>& h) const;

 private:
  RadialPoint rho_;
  std::shared_ptr<const MomentState> state_;
  std::vector<Node> nodes_;
  std::vector<double> kinks_;
  double b_max_;
};

double D_eval(double t, const RadialPoint& rho, int order = 0);
double D_t_eval(double t, const RadialPoint& rho, int order = 0);
Vector D_rho_eval(double t, const RadialPoint& rho, int order = 0);

struct McEstimate {
  double value;
  double std_error;
  std::uint64_t samples;
};

/// Fraction of uniform points of the simplex with b(lambda, rho) <= t. The
/// sample stream is split into fixed chunks with derived keys, so the result
/// does not depend on the number of workers.
McEstimate D_mc_oracle(double t, const RadialPoint& rho, std::uint64_t samples,
                       std::uint64_t seed, unsigned workers = 0);

}  // namespace fewnomial
