#ifndef MLQM_PCT_HPP
#define MLQM_PCT_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "mlqm/errors.hpp"
#include "mlqm/quadrature.hpp"

namespace mlqm {

using RealFunction = std::function<double(double)>;

/// eps = alpha * E + offset, alpha != 0.
struct AffineMap {
  double alpha = 1.0;
  double offset = 0.0;

  double to_epsilon(double energy) const { return alpha * energy + offset; }
  double to_energy(double epsilon) const { return (epsilon - offset) / alpha; }
  template <class C>
  C to_energy_c(const C& epsilon) const { return (epsilon - offset) / alpha; }
};

/// Leading large-|p| behaviour f ~ f4 p^4, g ~ g3 p^3, h ~ h2 p^2.
struct PowerLawAsymptotics {
  double f4 = 0.0;
  double g3 = 0.0;
  double h2 = 0.0;
};

/// Coefficients of the momentum-space equation -f psi'' + g psi' + h psi = eps psi,
/// with hand-supplied derivatives f', f'', g'.
class CoefficientSet {
public:
  struct Functions {
    RealFunction f, df, ddf;
    RealFunction g, dg;
    RealFunction h;
  };

  /// Validates ellipticity and the supplied derivatives at 100 random points
  /// in [-sample_range, sample_range].
  CoefficientSet(Functions fns, AffineMap energy_map, double sample_range,
                 std::optional<PowerLawAsymptotics> asymptotics = std::nullopt)
      : fns_(std::move(fns)), map_(energy_map), asym_(asymptotics), range_(sample_range) {
    if (!fns_.f || !fns_.df || !fns_.ddf || !fns_.g || !fns_.dg || !fns_.h)
      throw invalid_argument("coefficient set is missing a function");
    if (!(map_.alpha != 0.0) || !std::isfinite(map_.alpha) || !std::isfinite(map_.offset))
      throw invalid_argument("energy map needs a finite, non-zero slope");
    validate();
  }

  double f(double p) const { return fns_.f(p); }
  double df(double p) const { return fns_.df(p); }
  double ddf(double p) const { return fns_.ddf(p); }
  double g(double p) const { return fns_.g(p); }
  double dg(double p) const { return fns_.dg(p); }
  double h(double p) const { return fns_.h(p); }
  const AffineMap& energy_map() const { return map_; }
  const std::optional<PowerLawAsymptotics>& asymptotics() const { return asym_; }
  double sample_range() const { return range_; }

  /// chi = (f' + 2g) / (4f).
  double chi(double p) const { return (df(p) + 2.0 * g(p)) / (4.0 * f(p)); }

private:
  void validate() const {
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> dist(-range_, range_);
    auto check = [](double exact, double approx, double scale, const char* what) {
      if (!(std::abs(exact - approx) <= 1e-6 * std::max(std::abs(exact), scale)))
        throw invalid_argument(std::string("supplied derivative does not match its function: ") + what);
    };
    for (int i = 0; i < 100; ++i) {
      const double p = dist(rng);
      if (!(f(p) > 0.0)) throw ellipticity_error("f(p) must be positive on the working domain");
      const double step = 1e-4 * (1.0 + std::abs(p));
      auto central = [&](const RealFunction& fn) { return (fn(p + step) - fn(p - step)) / (2.0 * step); };
      const double fscale = std::abs(f(p)) / (1.0 + std::abs(p));
      check(df(p), central(fns_.f), fscale, "f'");
      check(ddf(p), central(fns_.df), std::abs(df(p)) / (1.0 + std::abs(p)) + fscale / (1.0 + p * p), "f''");
      check(dg(p), central(fns_.g), std::abs(g(p)) / (1.0 + std::abs(p)) + 1e-12, "g'");
    }
  }

  Functions fns_;
  AffineMap map_;
  std::optional<PowerLawAsymptotics> asym_;
  double range_;
};

/// q(p) = int_0^p dt / sqrt(f(t)) together with its inverse and range.
struct QMap {
  RealFunction q_of_p;
  RealFunction p_of_q;
  double q_min = -std::numeric_limits<double>::infinity();
  double q_max = std::numeric_limits<double>::infinity();
  bool analytic = false;
};

/// Closed forms that replace the numerical integrals when available.
struct TransformHints {
  std::optional<QMap> q_map;
  RealFunction log_rho; ///< log rho(p) = int_0^p chi
};

/// Analytic q-map for f = (1 + beta p^2)^2: q = atan(sqrt(beta) p) / sqrt(beta).
inline QMap deformed_q_map(double beta) {
  if (!(beta > 0.0)) throw invalid_argument("analytic q-map requires beta > 0");
  const double sb = std::sqrt(beta);
  QMap m;
  m.q_of_p = [sb](double p) { return std::atan(sb * p) / sb; };
  m.p_of_q = [sb](double q) { return std::tan(sb * q) / sb; };
  m.q_max = std::numbers::pi / (2.0 * sb);
  m.q_min = -m.q_max;
  m.analytic = true;
  return m;
}

/// Numeric q-map by adaptive quadrature; the inverse by bracketed root finding.
inline QMap numeric_q_map(const CoefficientSet& coeffs) {
  auto integrand = [coeffs](double t) {
    const double fv = coeffs.f(t);
    if (!(fv > 0.0)) throw ellipticity_error("f(p) <= 0 encountered while integrating dq = dp/sqrt(f)");
    return 1.0 / std::sqrt(fv);
  };
  QMap m;
  m.q_of_p = [integrand](double p) { return quadrature::adaptive(integrand, 0.0, p); };
  m.q_max = quadrature::adaptive(integrand, 0.0, std::numeric_limits<double>::infinity());
  m.q_min = -quadrature::adaptive(integrand, -std::numeric_limits<double>::infinity(), 0.0);
  m.p_of_q = [q_of_p = m.q_of_p, qmin = m.q_min, qmax = m.q_max](double q) {
    if (!(q > qmin && q < qmax)) throw domain_error("q outside the transformed domain");
    if (q == 0.0) return 0.0;
    double lo = 0.0, hi = q > 0.0 ? 1.0 : -1.0;
    while ((q > 0.0) ? q_of_p(hi) < q : q_of_p(hi) > q) {
      lo = hi;
      hi *= 2.0;
      if (std::abs(hi) > 1e300) throw domain_error("q-map inversion failed to bracket");
    }
    std::uintmax_t iters = 200;
    auto fn = [&](double p) { return q_of_p(p) - q; };
    auto tol = boost::math::tools::eps_tolerance<double>(50);
    auto [a, b] = q > 0.0 ? boost::math::tools::toms748_solve(fn, lo, hi, tol, iters)
                          : boost::math::tools::toms748_solve(fn, hi, lo, tol, iters);
    return 0.5 * (a + b);
  };
  return m;
}

/// q-map for the coefficient set, preferring the analytic hint when supplied.
/// A supplied hint is checked against quadrature at a few points.
inline QMap build_q_map(const CoefficientSet& coeffs, const std::optional<QMap>& analytic_hint = std::nullopt) {
  if (!analytic_hint) return numeric_q_map(coeffs);
  const QMap numeric = numeric_q_map(coeffs);
  for (double p : {-3.0, -0.7, 0.4, 2.5}) {
    const double a = analytic_hint->q_of_p(p), n = numeric.q_of_p(p);
    if (std::abs(a - n) > 1e-8 * std::max(1.0, std::abs(a)))
      throw invalid_argument("analytic q-map hint disagrees with quadrature");
  }
  return *analytic_hint;
}

struct RhoMap {
  RealFunction chi;
  RealFunction rho;
};

/// chi = (f' + 2g)/(4f) and rho = exp(int_0^p chi).
inline RhoMap build_rho(const CoefficientSet& coeffs, const RealFunction& log_rho_hint = {}) {
  RhoMap r;
  r.chi = [coeffs](double p) { return coeffs.chi(p); };
  if (log_rho_hint) {
    r.rho = [log_rho_hint](double p) { return std::exp(log_rho_hint(p)); };
  } else {
    r.rho = [chi = r.chi](double p) { return std::exp(quadrature::adaptive(chi, 0.0, p)); };
  }
  return r;
}

/// V(p) = (4g^2 + 3f'^2 + 8 g f')/(16 f) - f''/4 - g'/2 + h, before composing with p(q).
inline double potential_at_p(const CoefficientSet& c, double p) {
  const double f = c.f(p), df = c.df(p), g = c.g(p);
  return (4.0 * g * g + 3.0 * df * df + 8.0 * g * df) / (16.0 * f) - c.ddf(p) / 4.0 - c.dg(p) / 2.0 + c.h(p);
}

/// The Schroedinger form -phi'' + V(q) phi = eps phi of a coefficient set.
struct TransformedProblem {
  double q_min = 0.0;
  double q_max = 0.0;
  RealFunction potential; ///< V(q); throws domain_error outside (q_min, q_max)
  RealFunction q_of_p;
  RealFunction p_of_q;
  RealFunction rho;
  RealFunction chi;
  AffineMap energy_map;
};

inline RealFunction build_potential(const CoefficientSet& coeffs, const QMap& qmap) {
  return [coeffs, p_of_q = qmap.p_of_q, qmin = qmap.q_min, qmax = qmap.q_max](double q) {
    if (!(q > qmin && q < qmax)) throw domain_error("potential evaluated outside (q_min, q_max)");
    return potential_at_p(coeffs, p_of_q(q));
  };
}

/// The full transformation; the result owns copies of everything it needs.
inline TransformedProblem build_transformed_problem(const CoefficientSet& coeffs, const TransformHints& hints = {}) {
  const QMap qmap = build_q_map(coeffs, hints.q_map);
  const RhoMap rho = build_rho(coeffs, hints.log_rho);
  TransformedProblem t;
  t.q_min = qmap.q_min;
  t.q_max = qmap.q_max;
  t.potential = build_potential(coeffs, qmap);
  t.q_of_p = qmap.q_of_p;
  t.p_of_q = qmap.p_of_q;
  t.rho = rho.rho;
  t.chi = rho.chi;
  t.energy_map = coeffs.energy_map();
  return t;
}

/// Bound states of -d^2/dq^2 + nu sec^2(sqrt(beta) q) on |q| < pi/(2 sqrt(beta)):
/// eps_n = (A + n sqrt(beta))^2 with A = (sqrt(beta) + sqrt(beta + 4 nu)) / 2.
struct SecantSquaredLevels {
  double A = 0.0;
  double sqrt_beta = 0.0;

  double operator()(int n) const {
    const double x = A + n * sqrt_beta;
    return x * x;
  }
  /// Power k = A / sqrt(beta) of cos(sqrt(beta) q) in the eigenfunctions.
  double cos_power() const { return A / sqrt_beta; }
};

inline SecantSquaredLevels secant_squared_levels(double nu, double beta) {
  if (!(beta > 0.0)) throw invalid_argument("secant-squared levels need beta > 0");
  if (!(nu > -beta / 4.0))
    throw model_error("sec^2 strength below -beta/4 has no bounded-below spectrum");
  const double sb = std::sqrt(beta);
  return {0.5 * (sb + std::sqrt(beta + 4.0 * nu)), sb};
}

} // namespace mlqm

#endif
