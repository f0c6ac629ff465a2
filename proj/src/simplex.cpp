#include "fewnomial/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace fewnomial {
namespace {

constexpr double kSimplexTol = 1e-14;

struct ShiftedExp {
  double shift;     // max(0, max rho_i)
  Vector scaled;    // e^{rho_i - shift}, i = 0..m
  double total;     // sum of scaled
};

ShiftedExp shifted_exp(const RadialPoint& rho) {
  const int m = rho.dim();
  double shift = 0.0;
  for (int p = 0; p < m; ++p) shift = std::max(shift, rho.values()(p));
  ShiftedExp out{shift, Vector(m + 1), 0.0};
  out.scaled(0) = std::exp(-shift);
  for (int p = 1; p <= m; ++p) out.scaled(p) = std::exp(rho.values()(p - 1) - shift);
  out.total = out.scaled.sum();
  return out;
}

// Pieces of a uniform subdivision of the standard d-simplex, as vertex lists
// in simplex coordinates y (y >= 0, sum y <= 1). Uses the Freudenthal/Kuhn
// triangulation of the ordered region 0 <= z_1 <= ... <= z_d <= 1 with
// z_j = y_1 + ... + y_j, which is unimodular, so all pieces have equal volume.
std::vector<std::vector<Vector>> subdivide(int d, int k) {
  std::vector<std::vector<Vector>> pieces;
  std::vector<int> corner(d, 0);
  std::vector<int> perm(d);
  while (true) {
    std::iota(perm.begin(), perm.end(), 0);
    do {
      std::vector<Eigen::VectorXi> verts;
      Eigen::VectorXi v = Eigen::Map<Eigen::VectorXi>(corner.data(), d);
      verts.push_back(v);
      for (int j = 0; j < d; ++j) {
        v(perm[j]) += 1;
        verts.push_back(v);
      }
      bool inside = true;
      for (const auto& w : verts) {
        for (int j = 0; j + 1 < d && inside; ++j) inside = w(j) <= w(j + 1);
        if (!inside) break;
      }
      if (inside) {
        std::vector<Vector> piece;
        for (const auto& w : verts) {
          Vector y(d);
          for (int j = 0; j < d; ++j) y(j) = (w(j) - (j > 0 ? w(j - 1) : 0)) / static_cast<double>(k);
          piece.push_back(std::move(y));
        }
        pieces.push_back(std::move(piece));
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    int pos = 0;
    while (pos < d && ++corner[pos] == k) corner[pos++] = 0;
    if (pos == d) break;
  }
  return pieces;
}

struct BaseRule {
  std::vector<Vector> bary;  // barycentric coordinates, d+1 entries each
  std::vector<double> weights;
};

BaseRule base_rule(int d) {
  BaseRule r;
  if (d == 1) {
    const double a = 0.5 * std::sqrt(0.6);
    for (double x : {0.5 - a, 0.5, 0.5 + a}) r.bary.push_back((Vector(2) << 1.0 - x, x).finished());
    r.weights = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  } else if (d == 2) {
    // Degree-5 seven-point symmetric rule.
    const double s15 = std::sqrt(15.0);
    r.bary.push_back((Vector(3) << 1.0 / 3, 1.0 / 3, 1.0 / 3).finished());
    r.weights.push_back(9.0 / 40.0);
    for (const double sign : {-1.0, 1.0}) {
      const double a = (6.0 + sign * s15) / 21.0;
      const double w = (155.0 + sign * s15) / 1200.0;
      r.bary.push_back((Vector(3) << a, a, 1 - 2 * a).finished());
      r.bary.push_back((Vector(3) << a, 1 - 2 * a, a).finished());
      r.bary.push_back((Vector(3) << 1 - 2 * a, a, a).finished());
      r.weights.insert(r.weights.end(), 3, w);
    }
  } else {
    r.bary.push_back(Vector::Constant(d + 1, 1.0 / (d + 1)));
    r.weights.push_back(1.0);
  }
  return r;
}

// Facet coordinates y (dimension m-1) to homogeneous boundary coordinates.
Vector embed(int m, int facet, const Vector& y) {
  Vector x = Vector::Zero(m + 1);
  const double rest = std::max(0.0, 1.0 - y.sum());
  if (facet == 0) {
    for (int j = 0; j < m - 1; ++j) x(j + 1) = y(j);
    x(m) = rest;
  } else {
    int idx = 0;
    for (int j = 1; j <= m; ++j) {
      if (j == facet) continue;
      x(j) = y(idx++);
    }
    x(0) = rest;
  }
  return x;
}

}  // namespace

RadialPoint::RadialPoint(Vector rho) : rho_(std::move(rho)) {
  if (rho_.size() < 1) throw std::invalid_argument("RadialPoint: dimension must be >= 1");
  if (!rho_.allFinite()) throw std::invalid_argument("RadialPoint: entries must be finite");
}

RadialPoint::RadialPoint(std::initializer_list<double> rho)
    : RadialPoint(Eigen::Map<const Vector>(rho.begin(), static_cast<Eigen::Index>(rho.size()))) {}

Vector RadialPoint::homogeneous() const {
  Vector out(dim() + 1);
  out(0) = 0.0;
  out.tail(dim()) = rho_;
  return out;
}

SimplexPoint::SimplexPoint(Vector lambda) : lambda_(std::move(lambda)), lambda0_(0.0) {
  if (lambda_.size() < 1) throw std::invalid_argument("SimplexPoint: dimension must be >= 1");
  if (!lambda_.allFinite()) throw std::invalid_argument("SimplexPoint: entries must be finite");
  if (lambda_.minCoeff() < -kSimplexTol) throw std::invalid_argument("SimplexPoint: negative coordinate");
  lambda_ = lambda_.cwiseMax(0.0);
  lambda0_ = 1.0 - lambda_.sum();
  if (lambda0_ < -kSimplexTol) throw std::invalid_argument("SimplexPoint: |lambda| > 1");
  lambda0_ = std::max(0.0, lambda0_);
}

SimplexPoint SimplexPoint::from_homogeneous(const Vector& full) {
  if (full.size() < 2) throw std::invalid_argument("SimplexPoint: need m+1 >= 2 coordinates");
  if (std::abs(full.sum() - 1.0) > 1e-12)
    throw std::invalid_argument("SimplexPoint: homogeneous coordinates must sum to 1");
  if (full.minCoeff() < -kSimplexTol) throw std::invalid_argument("SimplexPoint: negative coordinate");
  return SimplexPoint(full.tail(full.size() - 1).cwiseMax(0.0), std::max(0.0, full(0)));
}

Vector SimplexPoint::homogeneous() const {
  Vector out(dim() + 1);
  out(0) = lambda0_;
  out.tail(dim()) = lambda_;
  return out;
}

BoundaryPoint::BoundaryPoint(int facet_, SimplexPoint coords_) : facet(facet_), coords(std::move(coords_)) {
  const int m = coords.dim();
  if (facet < 0 || facet > m) throw std::invalid_argument("BoundaryPoint: facet index out of range");
  if (coords.at(facet) > kSimplexTol)
    throw std::invalid_argument("BoundaryPoint: coordinate " + std::to_string(facet) + " must vanish");
}

BoundaryPoint BoundaryPoint::vertex(int m, int i, int facet) {
  if (i == facet) throw std::invalid_argument("BoundaryPoint::vertex: v_i does not lie on facet i");
  Vector x = Vector::Zero(m + 1);
  x(i) = 1.0;
  return BoundaryPoint(facet, SimplexPoint::from_homogeneous(x));
}

double log_partition(const RadialPoint& rho) {
  const auto e = shifted_exp(rho);
  return e.shift + std::log(e.total);
}

SimplexPoint moment_map(const RadialPoint& rho) {
  const auto e = shifted_exp(rho);
  return SimplexPoint::from_homogeneous(e.scaled / e.total);
}

Matrix moment_jacobian(const RadialPoint& rho) {
  const Vector mu = moment_map(rho).homogeneous();
  const int m = rho.dim();
  Matrix jac(m + 1, m);
  for (int i = 0; i <= m; ++i)
    for (int p = 1; p <= m; ++p) jac(i, p - 1) = (i == p ? mu(i) : 0.0) - mu(i) * mu(p);
  return jac;
}

std::vector<Matrix> moment_second_derivatives(const RadialPoint& rho) {
  const Vector mu = moment_map(rho).homogeneous();
  const Matrix jac = moment_jacobian(rho);
  const int m = rho.dim();
  // d/drho_q (delta_ip mu_i - mu_i mu_p) = delta_ip mu_{i,q} - mu_{i,q} mu_p - mu_i mu_{p,q}
  std::vector<Matrix> out(m + 1, Matrix::Zero(m, m));
  for (int i = 0; i <= m; ++i)
    for (int p = 1; p <= m; ++p)
      for (int q = 1; q <= m; ++q)
        out[i](p - 1, q - 1) = (i == p ? jac(i, q - 1) : 0.0) - jac(i, q - 1) * mu(p) - mu(i) * jac(p, q - 1);
  return out;
}

FacetRule facet_rule(int m, int facet, int order) {
  if (m < 1) throw std::invalid_argument("facet_rule: m must be >= 1");
  if (facet < 0 || facet > m) throw std::invalid_argument("facet_rule: invalid facet index");
  if (order < 1) throw std::invalid_argument("facet_rule: order must be >= 1");
  FacetRule rule{facet, {}, {}};
  const int d = m - 1;
  if (d == 0) {
    rule.nodes.emplace_back(facet, SimplexPoint::from_homogeneous(embed(m, facet, Vector(0))));
    rule.weights.push_back(1.0);
    return rule;
  }
  const auto pieces = subdivide(d, order);
  const auto base = base_rule(d);
  const double piece_weight = 1.0 / static_cast<double>(pieces.size());
  for (const auto& piece : pieces) {
    for (std::size_t q = 0; q < base.bary.size(); ++q) {
      Vector y = Vector::Zero(d);
      for (int v = 0; v <= d; ++v) y += base.bary[q](v) * piece[v];
      rule.nodes.emplace_back(facet, SimplexPoint::from_homogeneous(embed(m, facet, y)));
      rule.weights.push_back(piece_weight * base.weights[q]);
    }
  }
  return rule;
}

std::vector<FacetRule> facet_rules(int m, int order) {
  std::vector<FacetRule> out;
  for (int i = 0; i <= m; ++i) out.push_back(facet_rule(m, i, order));
  return out;
}

int facet_rule_degree(int m) {
  const int d = m - 1;
  if (d == 0) return 1 << 20;
  return d <= 2 ? 5 : 1;
}

}  // namespace fewnomial
