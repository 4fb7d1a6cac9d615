#ifndef MLQM_QUADRATURE_HPP
#define MLQM_QUADRATURE_HPP

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "mlqm/errors.hpp"

namespace mlqm::quadrature {

/// Nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

namespace detail {

inline GaussLegendreRule compute_gauss_legendre(int n) {
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on the Legendre recurrence.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) <= 4.0 * std::numeric_limits<double>::epsilon()) {
        // Refresh the derivative at the converged node.
        p0 = 1.0;
        p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        break;
      }
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

} // namespace detail

/// Cached Gauss-Legendre rule. Tables are built once per size and shared read-only.
inline std::shared_ptr<const GaussLegendreRule> gauss_legendre(int n) {
  if (n < 1) throw invalid_argument("Gauss-Legendre rule needs at least one node");
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const GaussLegendreRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_shared<const GaussLegendreRule>(detail::compute_gauss_legendre(n));
  return slot;
}

/// Adaptive Gauss-Kronrod (15-point) integral of f over [a, b]; a or b may be infinite.
/// Bisection stops at depth 12, which also bounds the work for integrands
/// that vanish up to rounding (the relative target is then unreachable).
template <class F>
double adaptive(F&& f, double a, double b, double abs_tol = 1e-12) {
  if (a == b) return 0.0;
  double error = 0.0;
  const double width = std::isfinite(a) && std::isfinite(b) ? std::abs(b - a) : 1.0;
  const double rel_tol = abs_tol / std::max(width, 1.0);
  const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, 12, std::max(rel_tol, 1e-15), &error);
  if (!std::isfinite(value)) throw divergence_error("adaptive quadrature produced a non-finite value");
  return value;
}

} // namespace mlqm::quadrature

#endif
