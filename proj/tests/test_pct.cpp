#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "mlqm/models.hpp"
#include "mlqm/pct.hpp"

using namespace mlqm;

namespace {

// f = (1 + beta p^2)^2 with the given g and h.
CoefficientSet deformed_f(double beta, RealFunction g, RealFunction dg, RealFunction h) {
  CoefficientSet::Functions fn;
  fn.f = [beta](double p) { return std::pow(1.0 + beta * p * p, 2); };
  fn.df = [beta](double p) { return 4.0 * beta * p * (1.0 + beta * p * p); };
  fn.ddf = [beta](double p) { return 4.0 * beta * (1.0 + 3.0 * beta * p * p); };
  fn.g = std::move(g);
  fn.dg = std::move(dg);
  fn.h = std::move(h);
  return CoefficientSet(std::move(fn), AffineMap{}, 10.0);
}

RealFunction zero() { return [](double) { return 0.0; }; }

} // namespace

TEST(CoefficientSet, RejectsWrongDerivative) {
  CoefficientSet::Functions fn;
  fn.f = [](double p) { return 1.0 + p * p; };
  fn.df = [](double p) { return 2.0 * p + 0.01; };
  fn.ddf = [](double) { return 2.0; };
  fn.g = zero();
  fn.dg = zero();
  fn.h = zero();
  EXPECT_THROW(CoefficientSet(fn, AffineMap{}, 5.0), invalid_argument);
}

TEST(CoefficientSet, RejectsNonPositiveF) {
  CoefficientSet::Functions fn;
  fn.f = [](double p) { return p * p - 1.0; };
  fn.df = [](double p) { return 2.0 * p; };
  fn.ddf = [](double) { return 2.0; };
  fn.g = zero();
  fn.dg = zero();
  fn.h = zero();
  EXPECT_THROW(CoefficientSet(fn, AffineMap{}, 5.0), ellipticity_error);
}

TEST(CoefficientSet, EnergyMapRoundTrip) {
  const auto c = displaced_coefficients(DisplacedOscillatorParams{});
  for (double e : {-3.0, 0.0, 0.65, 17.25}) EXPECT_NEAR(c.energy_map().to_energy(c.energy_map().to_epsilon(e)), e, 1e-14);
}

TEST(QMap, AnalyticExamples) {
  const QMap m = deformed_q_map(0.25);
  EXPECT_EQ(m.q_of_p(0.0), 0.0);
  EXPECT_NEAR(m.q_of_p(2.0), std::numbers::pi / 2.0, 1e-15);
  EXPECT_NEAR(m.q_max, std::numbers::pi, 1e-15);
  EXPECT_NEAR(m.q_min, -std::numbers::pi, 1e-15);
}

TEST(QMap, NumericAgreesWithAnalyticOnRandomPoints) {
  const double beta = 0.3;
  const auto c = deformed_f(beta, zero(), zero(), zero());
  const QMap num = numeric_q_map(c);
  const QMap ana = deformed_q_map(beta);
  EXPECT_NEAR(num.q_max, ana.q_max, 1e-10 * ana.q_max);
  EXPECT_NEAR(num.q_min, ana.q_min, 1e-10 * ana.q_max);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> dist(-50.0, 50.0);
  for (int i = 0; i < 100; ++i) {
    const double p = dist(rng);
    EXPECT_NEAR(num.q_of_p(p), ana.q_of_p(p), 1e-10 * std::max(1.0, std::abs(ana.q_of_p(p))));
  }
}

TEST(QMap, InverseRoundTripAndMonotone) {
  const auto c = deformed_f(0.5, zero(), zero(), zero());
  for (const QMap& m : {numeric_q_map(c), deformed_q_map(0.5)}) {
    double prev = -INFINITY;
    for (double p : {-30.0, -4.0, -0.3, 0.0, 0.2, 1.5, 9.0, 80.0}) {
      const double q = m.q_of_p(p);
      EXPECT_GT(q, prev);
      prev = q;
      EXPECT_NEAR(m.p_of_q(q), p, 1e-10 * std::max(1.0, std::abs(p)));
    }
  }
}

TEST(QMap, HintIsCheckedAgainstQuadrature) {
  const auto c = deformed_f(0.5, zero(), zero(), zero());
  EXPECT_NO_THROW(build_q_map(c, deformed_q_map(0.5)));
  EXPECT_THROW(build_q_map(c, deformed_q_map(0.4)), invalid_argument);
}

TEST(Rho, CancellingDriftGivesUnitRho) {
  const double beta = 0.2;
  const auto c = deformed_f(
      beta, [beta](double p) { return -2.0 * beta * p * (1.0 + beta * p * p); },
      [beta](double p) { return -2.0 * beta * (1.0 + 3.0 * beta * p * p); }, zero());
  const RhoMap r = build_rho(c);
  for (double p : {-3.0, 0.0, 0.4, 7.0}) {
    EXPECT_NEAR(r.chi(p), 0.0, 1e-15);
    EXPECT_NEAR(r.rho(p), 1.0, 1e-14);
  }
}

TEST(Rho, PureDeformationGivesSquareRoot) {
  const double beta = 0.2;
  const auto c = deformed_f(beta, zero(), zero(), zero());
  const RhoMap r = build_rho(c);
  EXPECT_EQ(r.rho(0.0), 1.0);
  for (double p : {-3.0, 0.4, 7.0}) {
    EXPECT_NEAR(r.chi(p), beta * p / (1.0 + beta * p * p), 1e-15);
    EXPECT_NEAR(r.rho(p), std::sqrt(1.0 + beta * p * p), 1e-11);
  }
}

TEST(Potential, PureDeformationIsConstantMinusBeta) {
  const double beta = 0.35;
  const auto c = deformed_f(beta, zero(), zero(), zero());
  const TransformedProblem t = build_transformed_problem(c, {deformed_q_map(beta), {}});
  for (int i = 1; i <= 50; ++i) {
    const double q = t.q_min + (t.q_max - t.q_min) * i / 51.0;
    EXPECT_NEAR(t.potential(q), -beta, 1e-9 * (1.0 + std::pow(1.0 / std::cos(std::sqrt(beta) * q), 4)));
  }
  EXPECT_THROW(t.potential(t.q_max), domain_error);
  EXPECT_THROW(t.potential(t.q_min - 0.1), domain_error);
}

TEST(Potential, DisplacedOscillatorIsShiftedSecantSquared) {
  const DisplacedOscillatorParams prm{{1.0, 0.1, 0.03}, 1.3, 0.8, 0.5};
  const auto t = displaced_problem(prm);
  const double hb = 1.0, mu = 1.3, w = 0.8, beta = 0.1, lambda = 0.5, gamma = 0.03;
  const double s2 = hb * hb * mu * mu * w * w;
  for (double q : {-4.0, -1.0, 0.0, 0.5, 3.9}) {
    const double sec2 = 1.0 / std::pow(std::cos(std::sqrt(beta) * q), 2);
    const double expect = sec2 / (s2 * beta) + lambda * lambda / (s2 * w * w) - 1.0 / (s2 * beta) + gamma;
    EXPECT_NEAR(t.potential(q), expect, 1e-10 * std::abs(expect));
  }
}

TEST(Potential, SwansonIsShiftedSecantSquared) {
  SwansonParams prm;
  prm.deformation = {1.0, 0.5, 0.1};
  prm.lambda = 0.3;
  prm.delta = 0.1;
  prm.m = 1.2;
  const auto t = swanson_problem(prm);
  const double w = 1.0, l = 0.3, d = 0.1, K = w - l - d, beta = 0.5, m = 1.2;
  const double den = m * m * w * w * beta * K * K;
  const double nu = (w * w - 4 * l * d - m * w * w * beta * K) / den;
  for (double q : {-2.0, -0.3, 0.0, 1.1, 2.1}) {
    const double sec2 = 1.0 / std::pow(std::cos(std::sqrt(beta) * q), 2);
    const double expect = nu * sec2 + (4 * l * d - w * w) / den;
    EXPECT_NEAR(t.potential(q), expect, 1e-10 * std::max(1.0, std::abs(expect)));
  }
}

TEST(SecantLevels, Examples) {
  const auto s = secant_squared_levels(2.0 * 0.25, 0.25);
  for (int n = 0; n < 6; ++n) EXPECT_NEAR(s(n), 0.25 * (n + 2) * (n + 2), 1e-13);
  const auto d = secant_squared_levels(1.0 / 0.1, 0.1);
  // (sqrt(0.1) + sqrt(40.1)) / 2 = 3.32434192...
  EXPECT_NEAR(d.A, 3.32434192, 1e-8);
  EXPECT_NEAR(d.A, 3.3243416, 5e-7);
  for (int n = 0; n < 6; ++n)
    EXPECT_NEAR(d(n + 1) - d(n), 0.1 * (2 * n + 1) + 2.0 * d.A * std::sqrt(0.1), 1e-12);
  EXPECT_THROW(secant_squared_levels(-0.25 * 0.3, 0.3), model_error);
  EXPECT_THROW(secant_squared_levels(1.0, 0.0), invalid_argument);
}

TEST(Transformation, NumericPipelineReproducesCanonicalEigenfunction) {
  // rho and q from quadrature alone (no hints), composed with the sec^2
  // eigenfunction, must give the model's canonical psi_n.
  const DisplacedOscillatorParams prm{{1.0, 0.1, 0.04}, 1.0, 1.0, 0.5};
  const auto c = displaced_coefficients(prm);
  const TransformedProblem t = build_transformed_problem(c);
  for (int n = 0; n < 4; ++n) {
    const auto psi = displaced_wavefunction(n, prm);
    for (double p : {-6.0, -1.0, 0.3, 2.0, 12.0}) {
      const double composed = psi.norm * t.rho(p) * psi.phi(t.q_of_p(p));
      EXPECT_NEAR(composed, psi(p), 1e-9 * std::max(1e-3, std::abs(psi(p)))) << n << " " << p;
    }
  }
}
