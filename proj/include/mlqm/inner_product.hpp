#ifndef MLQM_INNER_PRODUCT_HPP
#define MLQM_INNER_PRODUCT_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "mlqm/deformation.hpp"
#include "mlqm/quadrature.hpp"

namespace mlqm {

enum class MetricKind { displaced, swanson, generic, identity };

inline std::string to_string(MetricKind k) {
  switch (k) {
  case MetricKind::displaced: return "displaced";
  case MetricKind::swanson: return "swanson";
  case MetricKind::generic: return "generic";
  case MetricKind::identity: return "identity";
  }
  return "unknown";
}

/// Positive weight eta(p) defining <phi|psi>_eta = <phi|eta psi>.
struct MetricFunction {
  std::function<double(double)> eval;
  MetricKind kind = MetricKind::generic;

  double operator()(double p) const { return eval(p); }

  static MetricFunction identity() {
    return {[](double) { return 1.0; }, MetricKind::identity};
  }
};

struct QuadratureSpec {
  enum class Scheme { gauss_legendre_q, trapezoid_p };
  Scheme scheme = Scheme::gauss_legendre_q;
  int node_count = 512;
  double p_truncation = 50.0;

  void validate() const {
    if (node_count < 16) throw invalid_argument("quadrature needs node_count >= 16");
    if (scheme == Scheme::trapezoid_p && !(p_truncation > 0.0))
      throw invalid_argument("p_truncation must be positive");
  }
};

/// Quadrature node in p together with its full weight, including the
/// deformed measure (and the dp/dq Jacobian for the q scheme).
struct WeightedNode {
  double p;
  double weight;
};

/// (1 + beta p^2)^(gamma/beta) at p = tan(sqrt(beta) q) / sqrt(beta): the
/// factor for which dp / (1 + beta p^2)^(1 - gamma/beta) = jacobian(q) dq.
inline double measure_jacobian(const DeformationParams& params, double q) {
  const double sb = std::sqrt(params.beta);
  const double c = std::cos(sb * q);
  // 1 + beta p^2 = sec^2(sqrt(beta) q)
  return std::pow(c * c, -params.gamma_over_beta());
}

inline std::vector<WeightedNode> weighted_nodes(const DeformationParams& params, const QuadratureSpec& quad,
                                                int node_count) {
  params.validate();
  std::vector<WeightedNode> out(static_cast<std::size_t>(node_count));
  if (quad.scheme == QuadratureSpec::Scheme::gauss_legendre_q) {
    if (!(params.beta > 0.0))
      throw invalid_argument("the q-substitution quadrature requires beta > 0; use trapezoid_p");
    const auto rule = quadrature::gauss_legendre(node_count);
    const double sb = std::sqrt(params.beta);
    const double half = std::numbers::pi / (2.0 * sb);
    for (int i = 0; i < node_count; ++i) {
      const double q = half * rule->nodes[i];
      out[i].p = std::tan(sb * q) / sb;
      out[i].weight = half * rule->weights[i] * measure_jacobian(params, q);
    }
  } else {
    const double h = 2.0 * quad.p_truncation / (node_count - 1);
    for (int i = 0; i < node_count; ++i) {
      const double p = -quad.p_truncation + h * i;
      const double endpoint = (i == 0 || i == node_count - 1) ? 0.5 : 1.0;
      out[i].p = p;
      out[i].weight = endpoint * h * params.measure(p);
    }
  }
  return out;
}

namespace detail {

template <class Integrand>
complex integrate_checked(const DeformationParams& params, const QuadratureSpec& quad, Integrand&& integrand) {
  quad.validate();
  auto run = [&](int n, double* abs_scale) {
    complex sum = 0.0;
    double abs_sum = 0.0;
    for (const auto& node : weighted_nodes(params, quad, n)) {
      const complex v = integrand(node.p);
      sum += node.weight * v;
      abs_sum += node.weight * std::abs(v);
    }
    if (abs_scale) *abs_scale = abs_sum;
    return sum;
  };
  double scale = 0.0;
  const complex fine = run(quad.node_count, &scale);
  const complex coarse = run(quad.node_count / 2, nullptr);
  if (!std::isfinite(fine.real()) || !std::isfinite(fine.imag()) || !std::isfinite(scale))
    throw divergence_error("inner product integrand is not finite");
  if (std::abs(fine - coarse) > 1e-3 * std::max(std::abs(fine), scale))
    throw divergence_error("inner product does not converge under node doubling");
  return fine;
}

} // namespace detail

/// <phi|psi> = int conj(phi) psi / (1 + beta p^2)^(1 - gamma/beta) dp.
///
/// The default scheme substitutes p = tan(sqrt(beta) q)/sqrt(beta) and
/// applies Gauss-Legendre on the finite q interval. The result is checked
/// against the same rule with half the nodes.
template <class Phi, class Psi>
complex deformed_inner(Phi&& phi, Psi&& psi, const DeformationParams& params, const QuadratureSpec& quad = {}) {
  return detail::integrate_checked(params, quad,
                                   [&](double p) { return std::conj(complex(phi(p))) * complex(psi(p)); });
}

/// <phi|psi>_eta = int eta conj(phi) psi / (1 + beta p^2)^(1 - gamma/beta) dp.
template <class Phi, class Psi>
complex eta_inner(Phi&& phi, Psi&& psi, const MetricFunction& eta, const DeformationParams& params,
                  const QuadratureSpec& quad = {}) {
  return detail::integrate_checked(params, quad, [&](double p) {
    return eta(p) * std::conj(complex(phi(p))) * complex(psi(p));
  });
}

/// Trapezoid rule on the grid of two GridFunctions, deformed measure included.
inline complex deformed_inner(const GridFunction& phi, const GridFunction& psi, const DeformationParams& params) {
  if (!(phi.grid() == psi.grid())) throw invalid_argument("grid functions live on different grids");
  const auto p = phi.grid().points();
  const double h = phi.grid().spacing();
  complex sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double endpoint = (i == 0 || i + 1 == p.size()) ? 0.5 : 1.0;
    sum += endpoint * h * params.measure(p[i]) * std::conj(phi[i]) * psi[i];
  }
  return sum;
}

inline complex eta_inner(const GridFunction& phi, const GridFunction& psi, const MetricFunction& eta,
                         const DeformationParams& params) {
  if (!(phi.grid() == psi.grid())) throw invalid_argument("grid functions live on different grids");
  const auto p = phi.grid().points();
  const double h = phi.grid().spacing();
  complex sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double endpoint = (i == 0 || i + 1 == p.size()) ? 0.5 : 1.0;
    sum += endpoint * h * eta(p[i]) * params.measure(p[i]) * std::conj(phi[i]) * psi[i];
  }
  return sum;
}

} // namespace mlqm

#endif
