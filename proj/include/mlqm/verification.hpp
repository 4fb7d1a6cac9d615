#ifndef MLQM_VERIFICATION_HPP
#define MLQM_VERIFICATION_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "mlqm/deformed_algebra.hpp"
#include "mlqm/eigensolver.hpp"
#include "mlqm/inner_product.hpp"
#include "mlqm/jet.hpp"
#include "mlqm/models.hpp"

namespace mlqm {

/// Per-check thresholds used by the verification battery and the acceptance run.
namespace tolerance {
inline constexpr double q_space_agreement = 1e-6;
inline constexpr double p_space_agreement = 1e-5;
inline constexpr double oracle_agreement = 1e-4;
inline constexpr double pseudo_hermiticity = 1e-6;
inline constexpr double hermiticity_defect_min = 1e-2;
inline constexpr double wrong_metric_min = 1e-2;
inline constexpr double hermitian_adjoint = 1e-8;
inline constexpr double gram = 1e-7;
inline constexpr double gram_without_metric_min = 1e-3;
inline constexpr double ode_residual = 1e-8;
inline constexpr double ode_fault_min = 1e-3;
inline constexpr double gamma_spread = 1e-6;
inline constexpr double classification = 1e-7;
inline constexpr double beta_continuity = 1e-6;
inline constexpr double commutator_ratio = 16.0;
inline constexpr double commutator_ratio_band = 3.0;
inline constexpr double onset_relative = 1e-2;
inline constexpr double uncertainty_saturation = 1e-8;
} // namespace tolerance

/// Which side of the tolerance passes.
enum class Bound {
  upper, ///< pass iff value <= tolerance
  lower  ///< pass iff value >= tolerance (checks that something is detected)
};

struct ResidualReport {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  Bound bound = Bound::upper;
  bool pass = false;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  nlohmann::ordered_json grid = nlohmann::ordered_json::object();
};

inline ResidualReport make_report(std::string name, double value, double tol, Bound bound = Bound::upper) {
  ResidualReport r;
  r.name = std::move(name);
  r.value = value;
  r.tolerance = tol;
  r.bound = bound;
  r.pass = bound == Bound::upper ? value <= tol : value >= tol;
  return r;
}

inline nlohmann::ordered_json to_json(const DeformationParams& d) {
  return {{"hbar", d.hbar}, {"beta", d.beta}, {"gamma", d.gamma}};
}

inline nlohmann::ordered_json to_json(const ModelParams& m) {
  nlohmann::ordered_json j;
  j["model"] = model_name(m);
  const auto& d = deformation_of(m);
  j["hbar"] = d.hbar;
  j["beta"] = d.beta;
  j["gamma"] = d.gamma;
  if (const auto* p = std::get_if<DisplacedOscillatorParams>(&m)) {
    j["mu"] = p->mu;
    j["omega"] = p->omega;
    j["lambda"] = p->lambda;
  } else {
    const auto& s = std::get<SwansonParams>(m);
    j["m"] = s.m;
    j["omega"] = s.omega;
    j["lambda"] = s.lambda;
    j["delta"] = s.delta;
  }
  return j;
}

inline nlohmann::ordered_json to_json(const MomentumGrid& g) {
  return {{"p_min", g.p_min()}, {"p_max", g.p_max()}, {"points", g.size()}};
}

inline nlohmann::ordered_json to_json(const ResidualReport& r) {
  return {{"name", r.name},         {"value", r.value}, {"tolerance", r.tolerance},
          {"bound", r.bound == Bound::upper ? "upper" : "lower"},
          {"pass", r.pass},         {"params", r.params}, {"grid", r.grid}};
}

// ---------------------------------------------------------------------------
// Adjoints and (pseudo-)Hermiticity

/// Diagonal of W: grid spacing times the deformed measure at each node.
inline Eigen::VectorXd measure_weights(const DeformationParams& params, const MomentumGrid& grid) {
  params.validate();
  const auto p = grid.points();
  Eigen::VectorXd w(static_cast<Eigen::Index>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) {
    w[static_cast<Eigen::Index>(i)] = grid.spacing() * params.measure(p[i]);
    if (!(w[static_cast<Eigen::Index>(i)] > 0.0)) throw domain_error("degenerate measure: zero weight on the grid");
  }
  return w;
}

/// H^dagger = W^-1 H^H W for the scalar product with weights W.
inline Eigen::MatrixXcd adjoint_under_weight(const Eigen::MatrixXcd& h, const DeformationParams& params,
                                             const MomentumGrid& grid) {
  if (h.rows() != h.cols() || h.rows() != static_cast<Eigen::Index>(grid.size()))
    throw invalid_argument("matrix does not match the grid");
  const Eigen::VectorXd w = measure_weights(params, grid);
  return w.cwiseInverse().asDiagonal() * h.adjoint() * w.asDiagonal();
}

/// W-orthonormal Hermite functions of width sigma on the grid. Residuals
/// compressed onto this subspace measure an operator on smooth, localized
/// states instead of its grid-scale edge entries.
struct ProbeBasis {
  Eigen::MatrixXcd phi;
  Eigen::VectorXd weights;

  Eigen::MatrixXcd compress(const Eigen::MatrixXcd& a) const {
    return phi.adjoint() * weights.asDiagonal() * a * phi;
  }
};

inline ProbeBasis make_probe_basis(const DeformationParams& params, const MomentumGrid& grid, int count = 8,
                                   double sigma = 1.0) {
  if (count < 1) throw invalid_argument("probe basis needs at least one function");
  const auto p = grid.points();
  const auto n = static_cast<Eigen::Index>(p.size());
  ProbeBasis b;
  b.weights = measure_weights(params, grid);
  b.phi.resize(n, count);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = p[static_cast<std::size_t>(i)] / sigma;
    double h0 = 1.0, h1 = 2.0 * x;
    const double g = std::exp(-0.5 * x * x);
    for (int k = 0; k < count; ++k) {
      b.phi(i, k) = (k == 0 ? h0 : h1) * g;
      if (k >= 1) {
        const double h2 = 2.0 * x * h1 - 2.0 * k * h0;
        h0 = h1;
        h1 = h2;
      }
    }
  }
  for (int k = 0; k < count; ++k) {
    for (int j = 0; j < k; ++j) {
      const complex c = (b.phi.col(j).adjoint() * b.weights.asDiagonal() * b.phi.col(k))(0, 0);
      b.phi.col(k) -= c * b.phi.col(j);
    }
    const double nrm = std::sqrt((b.phi.col(k).adjoint() * b.weights.asDiagonal() * b.phi.col(k))(0, 0).real());
    b.phi.col(k) /= nrm;
  }
  return b;
}

/// ||H^dagger - H||_F / ||H||_F.
inline double hermiticity_defect(const Eigen::MatrixXcd& h, const DeformationParams& params,
                                 const MomentumGrid& grid) {
  return (adjoint_under_weight(h, params, grid) - h).norm() / h.norm();
}

namespace detail {

inline void check_probe(const ProbeBasis& probe, const MomentumGrid& grid) {
  if (static_cast<std::size_t>(probe.phi.rows()) != grid.size())
    throw invalid_argument("probe basis was built on a different grid");
}

} // namespace detail

/// The defect restricted to the probe subspace.
inline double hermiticity_defect(const Eigen::MatrixXcd& h, [[maybe_unused]] const DeformationParams& params,
                                 const MomentumGrid& grid, const ProbeBasis& probe) {
  detail::check_probe(probe, grid);
  const Eigen::MatrixXcd c = probe.compress(h);
  return (c.adjoint() - c).norm() / c.norm();
}

namespace detail {

inline Eigen::VectorXd metric_on_grid(const MetricFunction& eta, const MomentumGrid& grid) {
  const auto p = grid.points();
  Eigen::VectorXd e(static_cast<Eigen::Index>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double v = eta(p[i]);
    if (!(v > 0.0) || !std::isfinite(v)) throw domain_error("metric must be positive and finite on the grid");
    e[static_cast<Eigen::Index>(i)] = v;
  }
  return e;
}

} // namespace detail

/// ||E H E^-1 - H^dagger||_F / ||H||_F with E = diag(eta).
inline ResidualReport pseudo_hermiticity_residual(const Eigen::MatrixXcd& h, const MetricFunction& eta,
                                                  const DeformationParams& params, const MomentumGrid& grid) {
  const Eigen::VectorXd e = detail::metric_on_grid(eta, grid);
  const Eigen::MatrixXcd lhs = e.asDiagonal() * h * e.cwiseInverse().asDiagonal();
  const double v = (lhs - adjoint_under_weight(h, params, grid)).norm() / h.norm();
  ResidualReport r = make_report("pseudo_hermiticity", v, tolerance::pseudo_hermiticity);
  r.grid = to_json(grid);
  r.params["metric"] = to_string(eta.kind);
  return r;
}

/// The same residual restricted to the probe subspace.
inline ResidualReport pseudo_hermiticity_residual(const Eigen::MatrixXcd& h, const MetricFunction& eta,
                                                  [[maybe_unused]] const DeformationParams& params,
                                                  const MomentumGrid& grid, const ProbeBasis& probe) {
  detail::check_probe(probe, grid);
  const Eigen::VectorXd e = detail::metric_on_grid(eta, grid);
  const Eigen::MatrixXcd lhs = probe.compress(e.asDiagonal() * h * e.cwiseInverse().asDiagonal());
  const Eigen::MatrixXcd c = probe.compress(h);
  const double v = (lhs - c.adjoint()).norm() / c.norm();
  ResidualReport r = make_report("pseudo_hermiticity_probe", v, tolerance::pseudo_hermiticity);
  r.grid = to_json(grid);
  r.grid["probe_functions"] = probe.phi.cols();
  r.params["metric"] = to_string(eta.kind);
  return r;
}

// ---------------------------------------------------------------------------
// Gram matrix and ODE residual

struct GramResult {
  Eigen::MatrixXcd matrix;
  ResidualReport report;
};

/// G[m][n] = <psi_m|psi_n>_eta; the report value is max |G - I|.
template <class State>
GramResult gram_matrix(const std::vector<State>& states, const MetricFunction& eta, const DeformationParams& params,
                       const QuadratureSpec& quad = {}) {
  const auto n = static_cast<Eigen::Index>(states.size());
  GramResult g;
  g.matrix.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      g.matrix(i, j) = eta_inner([&](double p) { return states[static_cast<std::size_t>(i)](p); },
                                 [&](double p) { return states[static_cast<std::size_t>(j)](p); }, eta, params, quad);
  const double dev = n == 0 ? 0.0 : (g.matrix - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
  g.report = make_report("gram_orthonormality", dev, tolerance::gram);
  g.report.params["metric"] = to_string(eta.kind);
  g.report.params["states"] = n;
  g.report.grid = {{"scheme", quad.scheme == QuadratureSpec::Scheme::gauss_legendre_q ? "gauss-legendre-q"
                                                                                      : "trapezoid-p"},
                   {"nodes", quad.node_count}};
  return g;
}

/// max |-f psi'' + g psi' + h psi - eps psi| / max |psi| over `samples`
/// points uniform in q. psi must accept a Jet and return a Jet.
template <class Psi>
ResidualReport ode_residual(const Psi& psi, const CoefficientSet& coeffs, double epsilon,
                            const TransformedProblem& problem, int samples = 1000) {
  if (samples < 1) throw invalid_argument("ode_residual needs at least one sample");
  double worst = 0.0, peak = 0.0;
  const double dq = (problem.q_max - problem.q_min) / samples;
  for (int j = 0; j < samples; ++j) {
    const double p = problem.p_of_q(problem.q_min + (j + 0.5) * dq);
    const Jet y = psi(Jet::variable(p));
    const double r = -coeffs.f(p) * y.dd + coeffs.g(p) * y.d + (coeffs.h(p) - epsilon) * y.v;
    worst = std::max(worst, std::abs(r));
    peak = std::max(peak, std::abs(y.v));
  }
  if (!(peak > 0.0)) throw invalid_argument("ode_residual of the zero function");
  ResidualReport rep = make_report("ode_residual", worst / peak, tolerance::ode_residual);
  rep.grid = {{"samples", samples}, {"sampling", "uniform-q"}};
  rep.params["epsilon"] = epsilon;
  return rep;
}

// ---------------------------------------------------------------------------
// gamma independence and limits

/// Largest relative spread of the p-space E_n (n < n_levels) across gamma values.
inline ResidualReport gamma_independence(const ModelParams& model, const std::vector<double>& gammas, int n_levels,
                                         const PSpaceOptions& opt) {
  if (gammas.empty()) throw invalid_argument("gamma_independence needs at least one gamma");
  std::vector<SpectrumResult> runs;
  for (double g : gammas) {
    DeformationParams d = deformation_of(model);
    d.gamma = g;
    runs.push_back(p_space_energies(with_deformation(model, d), n_levels, opt));
  }
  double spread = 0.0;
  for (const auto& run : runs)
    if (run.eigenvalues.size() != runs.front().eigenvalues.size())
      throw numeric_error("different numbers of levels survived for different gamma");
  for (std::size_t n = 0; n < runs.front().eigenvalues.size(); ++n)
    for (const auto& run : runs)
      spread = std::max(spread, std::abs(run.eigenvalues[n] - runs.front().eigenvalues[n]) /
                                    std::abs(runs.front().eigenvalues[n]));
  ResidualReport r = make_report("gamma_independence", spread, tolerance::gamma_spread);
  r.params = to_json(model);
  r.params["gammas"] = gammas;
  r.params["levels"] = n_levels;
  r.grid = {{"p_max", opt.p_max}, {"points", opt.points}};
  return r;
}

/// The closed forms carry no gamma; their spread is identically zero.
inline ResidualReport gamma_independence_closed(const ModelParams& model, const std::vector<double>& gammas,
                                                int n_levels) {
  double spread = 0.0;
  for (int n = 0; n < n_levels; ++n) {
    const complex ref = closed_form_energy(n, model);
    for (double g : gammas) {
      DeformationParams d = deformation_of(model);
      d.gamma = g;
      spread = std::max(spread, std::abs(closed_form_energy(n, with_deformation(model, d)) - ref));
    }
  }
  ResidualReport r = make_report("gamma_independence_closed", spread, 0.0);
  r.params = to_json(model);
  return r;
}

/// Ratio of commutator residuals for a Gaussian probe on grids with n and
/// 2n - 1 points over [-p_max, p_max]; 4th-order stencils give about 16.
inline double commutator_convergence_ratio(const DeformationParams& params, double p_max = 8.0,
                                           std::size_t n = 201) {
  auto residual = [&](std::size_t points) {
    const MomentumGrid g = MomentumGrid::symmetric(p_max, points);
    return commutator_residual(params, GridFunction::sample(g, [](double p) { return std::exp(-0.5 * p * p); }));
  };
  return residual(n) / residual(2 * n - 1);
}

} // namespace mlqm

#endif
