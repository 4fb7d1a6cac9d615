#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "mlqm/inner_product.hpp"
#include "mlqm/models.hpp"

using namespace mlqm;

TEST(DeformedInner, LorentzianIntegralIsPi) {
  const DeformationParams d{1.0, 1.0, 0.0};
  const complex v = deformed_inner([](double) { return 1.0; }, [](double) { return 1.0; }, d);
  EXPECT_NEAR(v.real(), std::numbers::pi, 1e-13);
  EXPECT_EQ(v.imag(), 0.0);
}

TEST(DeformedInner, NormalizedGroundStateHasUnitNorm) {
  const DisplacedOscillatorParams prm{{1.0, 0.1, 0.0}, 1.0, 1.0, 0.0};
  const auto psi = displaced_wavefunction(0, prm);
  EXPECT_NEAR(deformed_inner(psi, psi, prm.deformation).real(), 1.0, 1e-10);
}

TEST(DeformedInner, ConjugateSymmetryAndSesquilinearity) {
  const DeformationParams d{1.0, 0.3, 0.1};
  auto f = [](double p) { return complex(std::exp(-p * p), 0.3 * p * std::exp(-0.5 * p * p)); };
  auto g = [](double p) { return complex(1.0 / (1.0 + p * p), std::sin(p) / (1.0 + p * p)); };
  const complex fg = deformed_inner(f, g, d), gf = deformed_inner(g, f, d);
  EXPECT_NEAR(std::abs(fg - std::conj(gf)), 0.0, 1e-14);

  const complex a(0.7, -1.2), b(-0.4, 2.0);
  auto mix = [&](double p) { return a * f(p) + b * g(p); };
  const complex right = deformed_inner(g, mix, d);
  const complex expect_r = a * deformed_inner(g, f, d) + b * deformed_inner(g, g, d);
  EXPECT_NEAR(std::abs(right - expect_r), 0.0, 1e-13 * std::abs(expect_r));
  const complex left = deformed_inner(mix, g, d);
  const complex expect_l = std::conj(a) * deformed_inner(f, g, d) + std::conj(b) * deformed_inner(g, g, d);
  EXPECT_NEAR(std::abs(left - expect_l), 0.0, 1e-13 * std::abs(expect_l));
}

TEST(DeformedInner, QuadratureSchemesAgree) {
  const DeformationParams d{1.0, 0.5, 0.2};
  auto f = [](double p) { return std::exp(-0.5 * p * p); };
  QuadratureSpec trap;
  trap.scheme = QuadratureSpec::Scheme::trapezoid_p;
  trap.node_count = 4001;
  trap.p_truncation = 12.0;
  EXPECT_NEAR(deformed_inner(f, f, d).real(), deformed_inner(f, f, d, trap).real(), 1e-12);
}

TEST(DeformedInner, UndeformedRequiresTrapezoid) {
  const DeformationParams d{1.0, 0.0, 0.0};
  auto f = [](double p) { return std::exp(-0.5 * p * p); };
  EXPECT_THROW(deformed_inner(f, f, d), invalid_argument);
  QuadratureSpec trap;
  trap.scheme = QuadratureSpec::Scheme::trapezoid_p;
  trap.node_count = 2001;
  trap.p_truncation = 12.0;
  EXPECT_NEAR(deformed_inner(f, f, d, trap).real(), std::sqrt(std::numbers::pi), 1e-13);
}

TEST(DeformedInner, DivergentIntegrandIsReported) {
  // |phi|^2 / (1 + p^2) ~ |p|^0.4 is not integrable.
  const DeformationParams d{1.0, 1.0, 0.0};
  auto f = [](double p) { return std::pow(1.0 + p * p, 0.6); };
  EXPECT_THROW(deformed_inner(f, f, d), divergence_error);
}

TEST(DeformedInner, RejectsTooFewNodes) {
  QuadratureSpec q;
  q.node_count = 8;
  EXPECT_THROW(deformed_inner([](double) { return 1.0; }, [](double) { return 1.0; }, DeformationParams{1.0, 1.0, 0.0}, q),
               invalid_argument);
}

TEST(MeasureJacobian, MatchesAnalyticSubstitution) {
  for (double gamma : {0.0, 0.1, 0.35}) {
    const DeformationParams d{1.0, 0.4, gamma};
    const double sb = std::sqrt(0.4);
    for (double q : {-2.0, -0.5, 0.0, 1.3, 2.4}) {
      const double p = std::tan(sb * q) / sb;
      const double dpdq = 1.0 + 0.4 * p * p;
      EXPECT_NEAR(measure_jacobian(d, q), d.measure(p) * dpdq, 1e-12 * measure_jacobian(d, q));
    }
  }
}

TEST(EtaInner, UnitMetricIsBitIdenticalToPlainProduct) {
  const DeformationParams d{1.0, 0.2, 0.05};
  auto f = [](double p) { return complex(std::exp(-p * p), p / (2.0 + p * p * p * p)); };
  auto g = [](double p) { return complex(1.0 / (1.0 + p * p), 0.0); };
  EXPECT_EQ(eta_inner(f, g, MetricFunction::identity(), d), deformed_inner(f, g, d));
}

TEST(EtaInner, DisplacedEigenfunctionsAreOrthonormal) {
  const DisplacedOscillatorParams prm;
  const auto eta = displaced_metric(prm);
  for (int m = 0; m <= 4; ++m) {
    const auto a = displaced_wavefunction(m, prm);
    for (int n = 0; n <= 4; ++n) {
      const auto b = displaced_wavefunction(n, prm);
      const complex v = eta_inner(a, b, eta, prm.deformation);
      EXPECT_NEAR(std::abs(v - (m == n ? 1.0 : 0.0)), 0.0, 1e-8) << m << " " << n;
    }
  }
}

TEST(EtaInner, HermitianCaseNeedsNoMetric) {
  const DisplacedOscillatorParams prm{{1.0, 0.1, 0.0}, 1.0, 1.0, 0.0};
  for (int m = 0; m <= 3; ++m)
    for (int n = 0; n <= 3; ++n) {
      const complex v = deformed_inner(displaced_wavefunction(m, prm), displaced_wavefunction(n, prm), prm.deformation);
      EXPECT_NEAR(std::abs(v - (m == n ? 1.0 : 0.0)), 0.0, 1e-10);
    }
}

TEST(EtaInner, PositiveForNonzeroStates) {
  const SwansonParams s{{1.0, 0.5, 0.0}, 1.0, 1.0, 0.3, 0.1};
  const auto eta = swanson_metric(s);
  for (double c : {0.2, 1.0, 3.0}) {
    auto f = [c](double p) { return complex(std::cos(c * p), std::sin(p)) / (1.0 + p * p); };
    EXPECT_GT(eta_inner(f, f, eta, s.deformation).real(), 0.0);
  }
}

TEST(EtaInner, NodeDoublingConvergesForModelEigenfunctions) {
  const DisplacedOscillatorParams d;
  const SwansonParams s{{1.0, 0.5, 0.0}, 1.0, 1.0, 0.3, 0.1};
  QuadratureSpec q256;
  q256.node_count = 256;
  QuadratureSpec q512;
  q512.node_count = 512;
  for (int n = 0; n < 6; ++n) {
    const auto a = displaced_wavefunction(n, d);
    const complex lo = eta_inner(a, a, displaced_metric(d), d.deformation, q256);
    const complex hi = eta_inner(a, a, displaced_metric(d), d.deformation, q512);
    EXPECT_LT(std::abs(hi - lo) / std::abs(hi), 1e-9);
    const auto b = swanson_wavefunction(n, s);
    const complex lo2 = eta_inner(b, b, swanson_metric(s), s.deformation, q256);
    const complex hi2 = eta_inner(b, b, swanson_metric(s), s.deformation, q512);
    EXPECT_LT(std::abs(hi2 - lo2) / std::abs(hi2), 1e-9);
  }
}

TEST(GridInner, TrapezoidOnSampledFunctions) {
  const DeformationParams d{1.0, 0.2, 0.0};
  const auto g = MomentumGrid::symmetric(30.0, 6001);
  const auto phi = GridFunction::sample(g, [](double p) { return std::exp(-0.5 * p * p); });
  const double expect = deformed_inner([](double p) { return std::exp(-0.5 * p * p); },
                                       [](double p) { return std::exp(-0.5 * p * p); }, d)
                            .real();
  EXPECT_NEAR(deformed_inner(phi, phi, d).real(), expect, 1e-10);
  EXPECT_EQ(eta_inner(phi, phi, MetricFunction::identity(), d), deformed_inner(phi, phi, d));
}
