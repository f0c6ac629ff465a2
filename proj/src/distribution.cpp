#include "fewnomial/distribution.hpp"

#include "fewnomial/parallel.hpp"
#include "fewnomial/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fewnomial {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

}  // namespace

int default_facet_order(int m) {
  if (m <= 1) return 1;
  if (m == 2) return 32;
  if (m == 3) return 16;
  return 8;
}

int default_density_order(int m) { return m == 2 ? 2 : 1; }

FacetModel::FacetModel(const RadialPoint& rho, int order)
    : rho_(rho), state_(std::make_shared<const MomentState>(rho)), b_max_(fewnomial::b_max(rho)) {
  if (order <= 0) order = default_facet_order(rho.dim());
  for (const FacetRule& rule : facet_rules(rho.dim(), order)) {
    const double mu_i = state_->mu(rule.facet);
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      nodes_.push_back({rule.facet, rule.weights[k], mu_i * rule.weights[k],
                        LineSection(state_, rule.nodes[k].coords.homogeneous())});
      kinks_.push_back(nodes_.back().line.top());
    }
  }
  std::sort(kinks_.begin(), kinks_.end());
}

std::vector<double> FacetModel::solve_all(double t) const {
  std::vector<double> h(nodes_.size());
  for (std::size_t k = 0; k < nodes_.size(); ++k) h[k] = nodes_[k].line.solve(t);
  return h;
}

double FacetModel::value_from(const std::vector<double>& h) const {
  const int m = this->m();
  double sum = 0.0;
  for (std::size_t k = 0; k < nodes_.size(); ++k) sum += nodes_[k].coefficient * ipow(h[k], m);
  return std::clamp(sum, 0.0, 1.0);
}

double FacetModel::dt_from(double t, const std::vector<double>& h) const {
  const int m = this->m();
  if (t <= 0.0) {
    if (m == 1) return kInf;
    if (m > 2) return 0.0;
    // h^{m-1} h_t = h * h_t -> 1 / B_ss(0) for m = 2.
    double sum = 0.0;
    for (const Node& node : nodes_) sum += node.coefficient * 2.0 / node.line.curvature_at_zero();
    return sum;
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    if (h[k] >= 1.0) continue;
    sum += nodes_[k].coefficient * m * ipow(h[k], m - 1) / nodes_[k].line.slope(h[k]);
  }
  return sum;
}

Vector FacetModel::drho_from(double t, const std::vector<double>& h) const {
  const int m = this->m();
  Vector g = Vector::Zero(m);
  if (t <= 0.0) return g;
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    const Node& node = nodes_[k];
    const double hm = ipow(h[k], m);
    g += node.weight * hm * state_->jac.row(node.facet).transpose();
    if (h[k] < 1.0) {
      const double s = h[k];
      const Vector h_rho = -node.line.rho_gradient(s) / node.line.slope(s);
      g += node.coefficient * m * ipow(s, m - 1) * h_rho;
    }
  }
  return g;
}

double FacetModel::value(double t) const {
  if (t <= 0.0) return 0.0;
  if (t >= b_max_) return 1.0;
  return value_from(solve_all(t));
}
double FacetModel::dt(double t) const { return dt_from(t, solve_all(t)); }
Vector FacetModel::drho(double t) const { return drho_from(t, solve_all(t)); }

DistEval FacetModel::eval(double t) const {
  if (!(t >= 0.0)) throw std::domain_error("D: t must be nonnegative");
  const auto h = solve_all(t);
  return {t, rho_, value(t), dt_from(t, h), drho_from(t, h)};
}

double D_eval(double t, const RadialPoint& rho, int order) {
  if (!(t >= 0.0)) throw std::domain_error("D_eval: t must be nonnegative");
  return FacetModel(rho, order).value(t);
}

double D_t_eval(double t, const RadialPoint& rho, int order) {
  if (!(t >= 0.0)) throw std::domain_error("D_t_eval: t must be nonnegative");
  return FacetModel(rho, order).dt(t);
}

Vector D_rho_eval(double t, const RadialPoint& rho, int order) {
  if (!(t >= 0.0)) throw std::domain_error("D_rho_eval: t must be nonnegative");
  return FacetModel(rho, order).drho(t);
}

McEstimate D_mc_oracle(double t, const RadialPoint& rho, std::uint64_t samples,
                       std::uint64_t seed, unsigned workers) {
  if (samples == 0) throw std::invalid_argument("D_mc_oracle: samples must be positive");
  if (t >= fewnomial::b_max(rho)) return {1.0, 0.0, samples};
  if (t <= 0.0) return {0.0, 0.0, samples};
  const int m = rho.dim();
  const Vector r = rho.homogeneous();
  const double L = log_partition(rho);
  constexpr std::uint64_t kChunks = 64;
  std::vector<std::uint64_t> hits(kChunks, 0);
  if (workers == 0) workers = default_workers();
  parallel_for(kChunks, workers, [&](std::size_t c) {
    const std::uint64_t begin = samples * c / kChunks;
    const std::uint64_t end = samples * (c + 1) / kChunks;
    CounterRng rng(CounterRng::derive(seed, c));
    std::vector<double> e(m + 1);
    std::uint64_t count = 0;
    for (std::uint64_t i = begin; i < end; ++i) {
      double total = 0.0;
      for (double& v : e) total += (v = rng.exponential());
      // b = L + sum lambda_j log lambda_j - rho_j lambda_j, entropy form.
      double b = L;
      for (int j = 0; j <= m; ++j) {
        const double lam = e[j] / total;
        if (lam > 1e-300) b += lam * std::log(lam);
        b -= r(j) * lam;
      }
      if (b <= t) ++count;
    }
    hits[c] = count;
  });
  std::uint64_t count = 0;
  for (auto h : hits) count += h;
  const double p = static_cast<double>(count) / static_cast<double>(samples);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(samples)), samples};
}

}  // namespace fewnomial
