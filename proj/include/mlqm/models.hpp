#ifndef MLQM_MODELS_HPP
#define MLQM_MODELS_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <variant>

#include "mlqm/deformation.hpp"
#include "mlqm/inner_product.hpp"
#include "mlqm/jet.hpp"
#include "mlqm/pct.hpp"
#include "mlqm/special_functions.hpp"

namespace mlqm {

/// H = p^2/(2 mu) + mu omega^2 x^2 / 2 + i lambda x.
struct DisplacedOscillatorParams {
  DeformationParams deformation{1.0, 0.1, 0.0};
  double mu = 1.0;
  double omega = 1.0;
  double lambda = 0.5;

  void validate() const {
    deformation.validate();
    if (!(mu > 0.0) || !std::isfinite(mu)) throw invalid_argument("mu must be positive");
    if (!(omega > 0.0) || !std::isfinite(omega)) throw invalid_argument("omega must be positive");
    if (!std::isfinite(lambda)) throw invalid_argument("lambda must be finite");
  }

  /// lambda / (hbar mu omega^2), the coefficient of the arctan terms.
  double shift() const { return lambda / (deformation.hbar * mu * omega * omega); }
};

/// H = omega a^dag a + lambda a^2 + delta a^dag^2 + omega/2.
struct SwansonParams {
  DeformationParams deformation{1.0, 0.5, 0.0};
  double m = 1.0;
  double omega = 1.0;
  double lambda = 0.2;
  double delta = 0.2;

  /// omega - lambda - delta.
  double gap() const { return omega - lambda - delta; }

  void validate() const {
    deformation.validate();
    if (!(m > 0.0) || !std::isfinite(m)) throw invalid_argument("m must be positive");
    if (!(omega > 0.0) || !std::isfinite(omega)) throw invalid_argument("omega must be positive");
    if (!std::isfinite(lambda) || !std::isfinite(delta)) throw invalid_argument("lambda and delta must be finite");
    if (gap() == 0.0) throw model_error("degenerate Swanson model: omega - lambda - delta = 0");
    if (gap() < 0.0) throw model_error("Swanson model requires omega - lambda - delta > 0");
  }

  /// (delta - lambda) / (hbar m omega (omega - lambda - delta)).
  double asymmetry() const { return (delta - lambda) / (deformation.hbar * m * omega * gap()); }
};

using ModelParams = std::variant<DisplacedOscillatorParams, SwansonParams>;

/// Constants of the closed-form solution.
///
/// A and nu are those of the sec^2 problem -phi'' + nu sec^2(sqrt(beta) q) phi;
/// s is the Jacobi parameter A/sqrt(beta) - 1/2 and kappa the printed
/// exponent of (1 + beta p^2) in the momentum-space eigenfunction.
struct DerivedSpectralParams {
  double A = 0.0;
  double nu = 0.0;
  double s = 0.0;
  double kappa = 0.0;
  double offset = 0.0; ///< constant part of V(q)
};

/// N u^a exp(b atan(sqrt(beta) p)/sqrt(beta)) cos^k P_n^{(k-1/2,k-1/2)}(sin),
/// with cos and sin of atan(sqrt(beta) p). This is rho(p) phi_n(q(p)) for
/// rho = u^a exp(b q) and the sec^2 eigenfunction phi_n.
struct SecantEigenfunction {
  int n = 0;
  double beta = 0.0;
  double u_power = 0.0;    ///< a
  double atan_coeff = 0.0; ///< b
  double k = 0.0;
  double norm = 1.0;

  template <class T>
  T unnormalized(const T& p) const {
    using std::atan, std::exp, std::pow, std::sqrt;
    const double sb = std::sqrt(beta);
    const T u = 1.0 + beta * p * p;
    const T sin_q = sb * p * pow(u, -0.5);
    T out = pow(u, u_power - 0.5 * k) * jacobi_eval(JacobiOrder{n, k - 0.5, k - 0.5}, sin_q);
    if (atan_coeff != 0.0) out = out * exp(atan_coeff * atan(sb * p) / sb);
    return out;
  }
  template <class T>
  T operator()(const T& p) const { return norm * unnormalized(p); }

  /// phi_n(q) = cos^k(sqrt(beta) q) P_n(sin(sqrt(beta) q)), without rho or N.
  double phi(double q) const {
    const double sb = std::sqrt(beta);
    return std::pow(std::cos(sb * q), k) * jacobi_eval(JacobiOrder{n, k - 0.5, k - 0.5}, std::sin(sb * q));
  }
};

/// The closed form as printed: N u^e exp(b atan(sqrt(beta) p)/sqrt(beta))
/// P_n^{(a,a)}(sqrt(beta) p / (1 + beta p^2)).
struct PrintedEigenfunction {
  int n = 0;
  double beta = 0.0;
  double u_power = 0.0;
  double atan_coeff = 0.0;
  double jacobi_param = 0.0;
  double norm = 1.0;

  template <class T>
  T unnormalized(const T& p) const {
    using std::atan, std::exp, std::pow;
    const double sb = std::sqrt(beta);
    const T u = 1.0 + beta * p * p;
    T out = pow(u, u_power) * jacobi_eval(JacobiOrder{n, jacobi_param, jacobi_param}, sb * p / u);
    if (atan_coeff != 0.0) out = out * exp(atan_coeff * atan(sb * p) / sb);
    return out;
  }
  template <class T>
  T operator()(const T& p) const { return norm * unnormalized(p); }
};

namespace detail {

inline void require_deformed(const DeformationParams& d, const char* what) {
  if (!(d.beta > 0.0)) throw invalid_argument(std::string(what) + " requires beta > 0");
}

inline void require_level(int n) {
  if (n < 0) throw invalid_argument("level index must be non-negative");
}

/// Scale so that <psi|psi>_eta = 1 with N > 0.
template <class Psi>
double eta_norm(const Psi& psi, const MetricFunction& eta, const DeformationParams& d) {
  const double nrm = eta_inner(psi, psi, eta, d).real();
  if (!(nrm > 0.0) || !std::isfinite(nrm)) throw divergence_error("eigenfunction is not normalizable");
  return 1.0 / std::sqrt(nrm);
}

/// Generic metric (1 + beta p^2)^(-gamma/beta) exp(-2 int_0^p chi) by quadrature.
inline double generic_metric_at(const CoefficientSet& c, const DeformationParams& d, double p) {
  const double integral = quadrature::adaptive([&c](double t) { return c.chi(t); }, 0.0, p);
  return std::pow(1.0 + d.beta * p * p, -d.gamma_over_beta()) * std::exp(-2.0 * integral);
}

inline void assert_metric_agreement(const MetricFunction& closed, const CoefficientSet& c,
                                    const DeformationParams& d) {
  for (double p : {-4.0, -1.0, 0.5, 2.0, 7.0}) {
    const double a = closed(p), b = generic_metric_at(c, d, p);
    if (!(std::abs(a - b) <= 1e-8 * std::max(std::abs(a), std::abs(b))))
      throw numeric_error("closed-form metric disagrees with the generic formula");
  }
}

} // namespace detail

// ---------------------------------------------------------------------------
// Displaced oscillator

inline CoefficientSet displaced_coefficients(const DisplacedOscillatorParams& prm) {
  prm.validate();
  const double beta = prm.deformation.beta, gamma = prm.deformation.gamma, hbar = prm.deformation.hbar;
  const double c = prm.shift();
  const double h2 = 1.0 / (hbar * hbar * prm.mu * prm.mu * prm.omega * prm.omega) - gamma * (beta + gamma);
  CoefficientSet::Functions fn;
  fn.f = [beta](double p) { const double u = 1.0 + beta * p * p; return u * u; };
  fn.df = [beta](double p) { return 4.0 * beta * p * (1.0 + beta * p * p); };
  fn.ddf = [beta](double p) { return 4.0 * beta * (1.0 + 3.0 * beta * p * p); };
  fn.g = [beta, gamma, c](double p) { return -2.0 * (1.0 + beta * p * p) * ((gamma + beta) * p + c); };
  fn.dg = [beta, gamma, c](double p) {
    return -2.0 * (2.0 * beta * p * ((gamma + beta) * p + c) + (1.0 + beta * p * p) * (gamma + beta));
  };
  fn.h = [h2, gamma, c](double p) { return h2 * p * p - 2.0 * c * gamma * p; };
  const AffineMap map{2.0 / (hbar * hbar * prm.mu * prm.omega * prm.omega), gamma};
  return CoefficientSet(std::move(fn), map, 10.0,
                        PowerLawAsymptotics{beta * beta, -2.0 * beta * (gamma + beta), h2});
}

inline double displaced_energy(int n, const DisplacedOscillatorParams& prm) {
  detail::require_level(n);
  prm.validate();
  const double hbar = prm.deformation.hbar, beta = prm.deformation.beta;
  const double w = prm.omega, mu = prm.mu;
  const double nn = static_cast<double>(n);
  const double b = beta * hbar * w * mu;
  return hbar * w * (0.5 * b * (nn * nn + nn + 0.5) + (nn + 0.5) * std::sqrt(1.0 + 0.25 * b * b)) +
         prm.lambda * prm.lambda / (2.0 * mu * w * w);
}

inline DerivedSpectralParams displaced_derived(const DisplacedOscillatorParams& prm) {
  prm.validate();
  detail::require_deformed(prm.deformation, "displaced closed-form constants");
  const double hbar = prm.deformation.hbar, beta = prm.deformation.beta, gamma = prm.deformation.gamma;
  const double s2 = hbar * hbar * prm.mu * prm.mu * prm.omega * prm.omega;
  const double c = prm.shift();
  DerivedSpectralParams d;
  d.nu = 1.0 / (s2 * beta);
  d.A = secant_squared_levels(d.nu, beta).A;
  d.s = d.A / std::sqrt(beta) - 0.5;
  d.kappa = -(gamma / (2.0 * beta) + d.A / std::sqrt(beta));
  d.offset = c * c - 1.0 / (s2 * beta) + gamma;
  return d;
}

inline TransformHints displaced_hints(const DisplacedOscillatorParams& prm) {
  const double beta = prm.deformation.beta, gamma = prm.deformation.gamma, c = prm.shift();
  TransformHints h;
  h.q_map = deformed_q_map(beta);
  h.log_rho = [beta, gamma, c](double p) {
    const double sb = std::sqrt(beta);
    return -gamma / (2.0 * beta) * std::log1p(beta * p * p) - c * std::atan(sb * p) / sb;
  };
  return h;
}

inline TransformedProblem displaced_problem(const DisplacedOscillatorParams& prm) {
  detail::require_deformed(prm.deformation, "the q-space problem");
  return build_transformed_problem(displaced_coefficients(prm), displaced_hints(prm));
}

/// eta_ho = exp(2 c atan(sqrt(beta) p)/sqrt(beta)), c = lambda/(hbar mu omega^2).
inline MetricFunction displaced_metric(const DisplacedOscillatorParams& prm) {
  prm.validate();
  detail::require_deformed(prm.deformation, "the displaced metric");
  const double sb = std::sqrt(prm.deformation.beta), c = prm.shift();
  MetricFunction eta{[sb, c](double p) { return std::exp(2.0 * c * std::atan(sb * p) / sb); }, MetricKind::displaced};
  detail::assert_metric_agreement(eta, displaced_coefficients(prm), prm.deformation);
  return eta;
}

inline SecantEigenfunction displaced_wavefunction(int n, const DisplacedOscillatorParams& prm) {
  detail::require_level(n);
  const DerivedSpectralParams d = displaced_derived(prm);
  const double beta = prm.deformation.beta;
  SecantEigenfunction psi{n, beta, -prm.deformation.gamma / (2.0 * beta), -prm.shift(), d.A / std::sqrt(beta)};
  psi.norm = detail::eta_norm([&psi](double p) { return psi.unnormalized(p); }, displaced_metric(prm),
                              prm.deformation);
  return psi;
}

/// The eigenfunction exactly as printed (argument sqrt(beta)p/(1+beta p^2),
/// exponent -(gamma/2beta + A/sqrt(beta))). Unit amplitude at p = 0 for n = 0.
inline PrintedEigenfunction displaced_printed_wavefunction(int n, const DisplacedOscillatorParams& prm) {
  detail::require_level(n);
  const DerivedSpectralParams d = displaced_derived(prm);
  return {n, prm.deformation.beta, d.kappa, -prm.shift(), d.s};
}

// ---------------------------------------------------------------------------
// Swanson model

inline CoefficientSet swanson_coefficients(const SwansonParams& prm) {
  prm.validate();
  const double beta = prm.deformation.beta, gamma = prm.deformation.gamma, hbar = prm.deformation.hbar;
  const double K = prm.gap(), w = prm.omega, m = prm.m;
  const double dd = prm.asymmetry();
  const double g1 = dd + beta + gamma;
  const double hp2 = (w + prm.lambda + prm.delta) / (K * m * m * hbar * hbar * w * w) -
                     2.0 * gamma * (prm.delta - prm.lambda) / (K * hbar * m * w) - gamma * gamma;
  const double hu = (prm.delta - prm.lambda + w) / (hbar * m * w * K) + gamma;
  CoefficientSet::Functions fn;
  fn.f = [beta](double p) { const double u = 1.0 + beta * p * p; return u * u; };
  fn.df = [beta](double p) { return 4.0 * beta * p * (1.0 + beta * p * p); };
  fn.ddf = [beta](double p) { return 4.0 * beta * (1.0 + 3.0 * beta * p * p); };
  fn.g = [beta, g1](double p) { return -2.0 * g1 * (1.0 + beta * p * p) * p; };
  fn.dg = [beta, g1](double p) { return -2.0 * g1 * (1.0 + 3.0 * beta * p * p); };
  fn.h = [beta, hp2, hu](double p) { return hp2 * p * p - hu * (1.0 + beta * p * p); };
  const AffineMap map{2.0 / (w * hbar * m * K), -1.0 / (hbar * m * K)};
  return CoefficientSet(std::move(fn), map, 10.0,
                        PowerLawAsymptotics{beta * beta, -2.0 * beta * g1, hp2 - beta * hu});
}

/// [omega - hbar m omega beta (omega-lambda-delta)/2]^2 - 4 lambda delta.
inline double swanson_discriminant(const SwansonParams& prm) {
  const double t = prm.omega - 0.5 * prm.deformation.hbar * prm.m * prm.omega * prm.deformation.beta * prm.gap();
  return t * t - 4.0 * prm.lambda * prm.delta;
}

/// Closed-form level; complex (principal root) once the discriminant is negative.
inline complex swanson_energy(int n, const SwansonParams& prm) {
  detail::require_level(n);
  prm.validate();
  const double nn = static_cast<double>(n);
  const double a = 0.5 * prm.deformation.hbar * prm.m * prm.omega * prm.deformation.beta * prm.gap();
  const double disc = swanson_discriminant(prm);
  const complex root = disc >= 0.0 ? complex(std::sqrt(disc), 0.0) : complex(0.0, std::sqrt(-disc));
  return a * (nn * nn + nn + 0.5) + (nn + 0.5) * root;
}

inline bool swanson_spectrum_real(const SwansonParams& prm) { return swanson_discriminant(prm) >= 0.0; }

/// beta_c, or nullopt when lambda delta < 0 (real for every beta).
inline std::optional<double> swanson_beta_c(const SwansonParams& prm) {
  prm.validate();
  const double ld = prm.lambda * prm.delta;
  if (ld < 0.0) return std::nullopt;
  const double head = prm.omega - 2.0 * std::sqrt(ld);
  if (!(head > 0.0)) throw model_error("critical deformation needs omega - 2 sqrt(lambda delta) > 0");
  return 2.0 * head / (prm.m * prm.deformation.hbar * prm.omega * prm.gap());
}

inline DerivedSpectralParams swanson_derived(const SwansonParams& prm) {
  prm.validate();
  detail::require_deformed(prm.deformation, "Swanson closed-form constants");
  const double hbar = prm.deformation.hbar, beta = prm.deformation.beta, gamma = prm.deformation.gamma;
  const double w = prm.omega, m = prm.m, K = prm.gap();
  const double den = hbar * hbar * m * m * w * w * beta * K * K;
  DerivedSpectralParams d;
  d.nu = (w * w - 4.0 * prm.lambda * prm.delta - hbar * m * w * w * beta * K) / den;
  d.offset = (4.0 * prm.lambda * prm.delta - w * w) / den;
  const double disc = 1.0 + 4.0 * d.nu / beta;
  d.s = disc >= 0.0 ? 0.5 * std::sqrt(disc) : std::numeric_limits<double>::quiet_NaN();
  d.A = std::sqrt(beta) * (0.5 + d.s);
  d.kappa = (prm.lambda - prm.delta) / (2.0 * hbar * m * w) * K - gamma / (2.0 * beta) - (1.0 + 2.0 * d.s) / 2.0;
  return d;
}

inline TransformHints swanson_hints(const SwansonParams& prm) {
  const double beta = prm.deformation.beta, e = -(prm.deformation.gamma + prm.asymmetry()) / (2.0 * beta);
  TransformHints h;
  h.q_map = deformed_q_map(beta);
  h.log_rho = [beta, e](double p) { return e * std::log1p(beta * p * p); };
  return h;
}

inline TransformedProblem swanson_problem(const SwansonParams& prm) {
  detail::require_deformed(prm.deformation, "the q-space problem");
  return build_transformed_problem(swanson_coefficients(prm), swanson_hints(prm));
}

/// eta_s = (1 + beta p^2)^((delta-lambda)/(hbar m omega beta (omega-lambda-delta))).
inline MetricFunction swanson_metric(const SwansonParams& prm) {
  prm.validate();
  detail::require_deformed(prm.deformation, "the Swanson metric");
  const double beta = prm.deformation.beta, e = prm.asymmetry() / beta;
  MetricFunction eta{[beta, e](double p) { return std::pow(1.0 + beta * p * p, e); }, MetricKind::swanson};
  detail::assert_metric_agreement(eta, swanson_coefficients(prm), prm.deformation);
  return eta;
}

inline void require_real_swanson(const SwansonParams& prm) {
  if (!swanson_spectrum_real(prm) || !(swanson_derived(prm).nu > -prm.deformation.beta / 4.0))
    throw model_error("Swanson spectrum is complex at this beta (beta >= beta_c)");
}

inline SecantEigenfunction swanson_wavefunction(int n, const SwansonParams& prm) {
  detail::require_level(n);
  prm.validate();
  require_real_swanson(prm);
  const DerivedSpectralParams d = swanson_derived(prm);
  const double beta = prm.deformation.beta;
  SecantEigenfunction psi{n, beta, -(prm.deformation.gamma + prm.asymmetry()) / (2.0 * beta), 0.0,
                          d.A / std::sqrt(beta)};
  psi.norm = detail::eta_norm([&psi](double p) { return psi.unnormalized(p); }, swanson_metric(prm),
                              prm.deformation);
  return psi;
}

inline PrintedEigenfunction swanson_printed_wavefunction(int n, const SwansonParams& prm) {
  detail::require_level(n);
  prm.validate();
  require_real_swanson(prm);
  const DerivedSpectralParams d = swanson_derived(prm);
  return {n, prm.deformation.beta, d.kappa, 0.0, d.s};
}

// ---------------------------------------------------------------------------
// Uniform access over both models

inline const DeformationParams& deformation_of(const ModelParams& m) {
  return std::visit([](const auto& p) -> const DeformationParams& { return p.deformation; }, m);
}

inline ModelParams with_deformation(ModelParams m, const DeformationParams& d) {
  std::visit([&d](auto& p) { p.deformation = d; }, m);
  return m;
}

inline void validate(const ModelParams& m) {
  std::visit([](const auto& p) { p.validate(); }, m);
}

inline CoefficientSet coefficients(const ModelParams& m) {
  return std::visit(
      [](const auto& p) {
        if constexpr (std::is_same_v<std::decay_t<decltype(p)>, DisplacedOscillatorParams>)
          return displaced_coefficients(p);
        else
          return swanson_coefficients(p);
      },
      m);
}

inline complex closed_form_energy(int n, const ModelParams& m) {
  if (auto* d = std::get_if<DisplacedOscillatorParams>(&m)) return displaced_energy(n, *d);
  return swanson_energy(n, std::get<SwansonParams>(m));
}

inline TransformedProblem transformed_problem(const ModelParams& m) {
  if (auto* d = std::get_if<DisplacedOscillatorParams>(&m)) return displaced_problem(*d);
  return swanson_problem(std::get<SwansonParams>(m));
}

inline MetricFunction model_metric(const ModelParams& m) {
  if (auto* d = std::get_if<DisplacedOscillatorParams>(&m)) return displaced_metric(*d);
  return swanson_metric(std::get<SwansonParams>(m));
}

inline SecantEigenfunction model_wavefunction(int n, const ModelParams& m) {
  if (auto* d = std::get_if<DisplacedOscillatorParams>(&m)) return displaced_wavefunction(n, *d);
  return swanson_wavefunction(n, std::get<SwansonParams>(m));
}

inline std::string model_name(const ModelParams& m) {
  return std::holds_alternative<DisplacedOscillatorParams>(m) ? "displaced" : "swanson";
}

} // namespace mlqm

#endif
