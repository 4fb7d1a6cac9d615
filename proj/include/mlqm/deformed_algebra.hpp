#ifndef MLQM_DEFORMED_ALGEBRA_HPP
#define MLQM_DEFORMED_ALGEBRA_HPP

#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "mlqm/deformation.hpp"
#include "mlqm/inner_product.hpp"

namespace mlqm {

/// How derivative stencils treat the two grid ends.
enum class StencilClosure {
  one_sided, ///< 4th-order one-sided stencils in the first/last two rows
  dirichlet  ///< central stencil everywhere, samples beyond the grid taken as zero
};

namespace stencil {

// 4th-order first-derivative weights, all divided by 12 h.
inline constexpr double central[5] = {1.0, -8.0, 0.0, 8.0, -1.0};
inline constexpr double edge0[5] = {-25.0, 48.0, -36.0, 16.0, -3.0};
inline constexpr double edge1[5] = {-3.0, -10.0, 18.0, -6.0, 1.0};
// 4th-order second-derivative weights, divided by 12 h^2.
inline constexpr double second[5] = {-1.0, 16.0, -30.0, 16.0, -1.0};

} // namespace stencil

/// d/dp of grid samples with 4th-order central differences, one-sided at the edges.
inline std::vector<complex> derivative(const GridFunction& phi) {
  const std::size_t n = phi.size();
  if (n < 5) throw invalid_grid("finite differencing needs at least 5 grid points");
  const double inv = 1.0 / (12.0 * phi.grid().spacing());
  std::vector<complex> d(n);
  for (std::size_t i = 2; i + 2 < n; ++i) {
    complex s = 0.0;
    for (int k = 0; k < 5; ++k) s += stencil::central[k] * phi[i + k - 2];
    d[i] = s * inv;
  }
  // Left rows use samples 0..4, right rows the mirror image with a sign flip.
  auto edges = [&](std::size_t i, const double (&w)[5], std::size_t base, int dir) {
    complex s = 0.0;
    for (int k = 0; k < 5; ++k) s += w[k] * phi[static_cast<std::size_t>(static_cast<long>(base) + dir * k)];
    d[i] = static_cast<double>(dir) * s * inv;
  };
  edges(0, stencil::edge0, 0, 1);
  edges(1, stencil::edge1, 0, 1);
  edges(n - 1, stencil::edge0, n - 1, -1);
  edges(n - 2, stencil::edge1, n - 1, -1);
  return d;
}

/// x phi = i hbar [(1 + beta p^2) phi' + gamma p phi].
inline GridFunction apply_position(const DeformationParams& params, const GridFunction& phi) {
  params.validate();
  const auto d = derivative(phi);
  const auto p = phi.grid().points();
  std::vector<complex> out(phi.size());
  const complex ih(0.0, params.hbar);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = ih * ((1.0 + params.beta * p[i] * p[i]) * d[i] + params.gamma * p[i] * phi[i]);
  return GridFunction(phi.grid(), std::move(out));
}

/// p phi, pointwise.
inline GridFunction apply_momentum(const GridFunction& phi) {
  const auto p = phi.grid().points();
  std::vector<complex> out(phi.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = p[i] * phi[i];
  return GridFunction(phi.grid(), std::move(out));
}

/// First-derivative matrix with the chosen edge closure.
inline Eigen::MatrixXd derivative_matrix(const MomentumGrid& grid, StencilClosure closure) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  if (n < 5) throw invalid_grid("finite differencing needs at least 5 grid points");
  const double inv = 1.0 / (12.0 * grid.spacing());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool interior = i >= 2 && i + 2 < n;
    if (interior || closure == StencilClosure::dirichlet) {
      for (int k = 0; k < 5; ++k) {
        const Eigen::Index j = i + k - 2;
        if (j >= 0 && j < n) d(i, j) = stencil::central[k] * inv;
      }
      continue;
    }
    const double* w = (i == 0 || i == n - 1) ? stencil::edge0 : stencil::edge1;
    const int dir = i < 2 ? 1 : -1;
    const Eigen::Index base = i < 2 ? 0 : n - 1;
    for (int k = 0; k < 5; ++k) d(i, base + dir * k) += dir * w[k] * inv;
  }
  return d;
}

/// Matrix of x on the grid (i hbar [(1 + beta p^2) D + gamma p]).
inline Eigen::MatrixXcd position_matrix(const DeformationParams& params, const MomentumGrid& grid,
                                        StencilClosure closure = StencilClosure::one_sided) {
  params.validate();
  const auto p = grid.points();
  const Eigen::MatrixXd d = derivative_matrix(grid, closure);
  Eigen::MatrixXcd x(d.rows(), d.cols());
  const complex ih(0.0, params.hbar);
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    const double u = 1.0 + params.beta * p[i] * p[i];
    x.row(i) = (ih * u) * d.row(i).cast<complex>();
    x(i, i) += ih * params.gamma * p[i];
  }
  return x;
}

inline Eigen::MatrixXcd momentum_matrix(const MomentumGrid& grid) {
  const auto p = grid.points();
  Eigen::VectorXcd diag(static_cast<Eigen::Index>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) diag[static_cast<Eigen::Index>(i)] = p[i];
  return diag.asDiagonal();
}

/// || [x,p] phi - i hbar (1 + beta p^2) phi || / || phi || over interior points
/// (the two outermost points at each end are excluded).
inline double commutator_residual(const DeformationParams& params, const GridFunction& phi) {
  const auto xp = apply_position(params, apply_momentum(phi));
  const auto px = apply_momentum(apply_position(params, phi));
  const auto p = phi.grid().points();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 2; i + 2 < phi.size(); ++i) {
    const complex target = complex(0.0, params.hbar) * (1.0 + params.beta * p[i] * p[i]) * phi[i];
    num += std::norm(xp[i] - px[i] - target);
    den += std::norm(phi[i]);
  }
  if (den == 0.0) throw invalid_argument("commutator residual of the zero function");
  return std::sqrt(num / den);
}

struct UncertaintyReport {
  double delta_x = 0.0;
  double delta_p = 0.0;
  double lhs = 0.0;        ///< delta_x * delta_p
  double rhs = 0.0;        ///< hbar/2 (1 + beta delta_p^2)
  double min_length = 0.0; ///< hbar sqrt(beta)
  double mean_p = 0.0;
  complex mean_x = 0.0;
  /// The inequality is only claimed for <p> = 0; false when |<p>| is not negligible.
  bool inequality_applies = false;
  /// `rel_slack` absorbs discretization error for states that saturate the bound.
  bool satisfied(double rel_slack = 1e-12) const { return lhs >= rhs * (1.0 - rel_slack); }
};

/// Position/momentum spreads of phi under the deformed scalar product.
///
/// `measure_source`, when given, supplies the measure of the scalar product;
/// otherwise `params` is used for both the operators and the measure.
inline UncertaintyReport uncertainty_check(const DeformationParams& params, const GridFunction& phi,
                                           std::optional<DeformationParams> measure_source = std::nullopt) {
  const DeformationParams& measure = measure_source ? *measure_source : params;
  const double norm = deformed_inner(phi, phi, measure).real();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw divergence_error("state is not normalizable on this grid");

  const auto pphi = apply_momentum(phi);
  const auto xphi = apply_position(params, phi);
  const double mean_p = deformed_inner(phi, pphi, measure).real() / norm;
  const double mean_p2 = deformed_inner(pphi, pphi, measure).real() / norm;
  const complex mean_x = deformed_inner(phi, xphi, measure) / norm;
  const double mean_x2 = deformed_inner(xphi, xphi, measure).real() / norm;

  UncertaintyReport r;
  r.mean_p = mean_p;
  r.mean_x = mean_x;
  r.delta_p = std::sqrt(std::max(0.0, mean_p2 - mean_p * mean_p));
  r.delta_x = std::sqrt(std::max(0.0, mean_x2 - std::norm(mean_x)));
  r.lhs = r.delta_x * r.delta_p;
  r.rhs = 0.5 * params.hbar * (1.0 + params.beta * r.delta_p * r.delta_p);
  r.min_length = params.min_length();
  r.inequality_applies = std::abs(mean_p) <= 1e-10 * std::max(1.0, r.delta_p);
  return r;
}

} // namespace mlqm

#endif
