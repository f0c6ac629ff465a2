#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fewnomial {

struct QuadratureTolerance {
  double abs = 1e-13;
  double rel = 1e-11;
  std::size_t max_intervals = 4000;
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
};

/// Raised when the adaptive integrator cannot reach the requested tolerance.
/// Carries the best estimate and its error bound so callers can decide.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, QuadratureResult best)
      : std::runtime_error(what), best_(best) {}
  const QuadratureResult& best() const noexcept { return best_; }

 private:
  QuadratureResult best_;
};

/// Adaptive Gauss-Kronrod integration of f over [a, b], with optional interior
/// breakpoints where the integrand is known to lose smoothness. Breakpoints
/// outside (a, b) are ignored; duplicates are merged.
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, std::vector<double> breakpoints = {},
                           const QuadratureTolerance& tol = {});

struct VectorQuadratureResult {
  Eigen::VectorXd value;
  double abs_error = 0.0;  // max-norm over components
};

/// Same contract as integrate() for an integrand with `dim` components that
/// share every evaluation. Subdivision is driven by the worst component.
VectorQuadratureResult integrate_vector(
    const std::function<Eigen::VectorXd(double)>& f, int dim, double a, double b,
    std::vector<double> breakpoints = {}, const QuadratureTolerance& tol = {});

}  // namespace fewnomial
