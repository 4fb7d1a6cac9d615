#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "mlqm/eigensolver.hpp"
#include "mlqm/verification.hpp"

using namespace mlqm;

namespace {

TransformedProblem box(RealFunction v, double q_min, double q_max) {
  TransformedProblem t;
  t.q_min = q_min;
  t.q_max = q_max;
  t.potential = std::move(v);
  return t;
}

CoefficientSet plain_oscillator() {
  CoefficientSet::Functions fn;
  fn.f = [](double) { return 1.0; };
  fn.df = [](double) { return 0.0; };
  fn.ddf = [](double) { return 0.0; };
  fn.g = [](double) { return 0.0; };
  fn.dg = [](double) { return 0.0; };
  fn.h = [](double p) { return p * p; };
  return CoefficientSet(std::move(fn), AffineMap{}, 5.0);
}

SwansonParams swanson(double beta, double lambda, double delta) {
  SwansonParams s;
  s.deformation = {1.0, beta, 0.0};
  s.lambda = lambda;
  s.delta = delta;
  return s;
}

} // namespace

// ---------------------------------------------------------------------------
// q space

TEST(QSpace, ParticleInABox) {
  const auto r = solve_q_space(box([](double) { return 0.0; }, 0.0, std::numbers::pi), 400, 6);
  EXPECT_EQ(r.source, SpectrumSource::q_space);
  for (int n = 0; n < 6; ++n) EXPECT_NEAR(r.eigenvalues[n].real(), (n + 1.0) * (n + 1.0), 1e-6 * (n + 1) * (n + 1));
}

TEST(QSpace, SecantSquaredLevels) {
  const double beta = 0.25, sb = 0.5;
  const double half = std::numbers::pi / (2.0 * sb);
  const auto r = solve_q_space(
      box([=](double q) { return 2.0 * beta / std::pow(std::cos(sb * q), 2); }, -half, half), 2000, 8);
  for (int n = 0; n < 8; ++n)
    EXPECT_NEAR(r.eigenvalues[n].real(), 0.25 * (n + 2) * (n + 2), 1e-6 * 0.25 * (n + 2) * (n + 2));
}

TEST(QSpace, DisplacedGroundLevel) {
  const auto t = displaced_problem(DisplacedOscillatorParams{});
  const auto r = solve_q_space(t, 2000, 1);
  const double A = 3.3243416; // 7 significant digits
  const double expect = A * A + 0.25 - 10.0;
  EXPECT_NEAR(r.eigenvalues[0].real(), expect, 2e-6 * std::abs(expect));
  const double exact = std::pow(displaced_derived(DisplacedOscillatorParams{}).A, 2) + 0.25 - 10.0;
  EXPECT_NEAR(r.eigenvalues[0].real(), exact, 1e-6 * exact);
}

TEST(QSpace, SecondOrderBeforeExtrapolation) {
  const double beta = 0.25, sb = 0.5;
  const double half = std::numbers::pi / (2.0 * sb);
  const auto t = box([=](double q) { return 2.0 * beta / std::pow(std::cos(sb * q), 2); }, -half, half);
  for (int n : {0, 2}) {
    const double exact = 0.25 * (n + 2) * (n + 2);
    const double e1 = q_space_levels(t, 500, n + 1)[n] - exact;
    const double e2 = q_space_levels(t, 1000, n + 1)[n] - exact;
    EXPECT_NEAR(e1 / e2, 4.0, 0.3) << n;
  }
}

TEST(QSpace, ResolutionAndGridGuards) {
  const auto t = box([](double) { return 0.0; }, 0.0, 1.0);
  EXPECT_THROW(solve_q_space(t, 32, 2), invalid_grid);
  EXPECT_THROW(solve_q_space(t, 100, 26), numeric_error);
  EXPECT_EQ(solve_q_space(t, 100, 0).eigenvalues.size(), 0u);
}

TEST(QSpace, ModelEnergiesMatchClosedForms) {
  const ModelParams d = DisplacedOscillatorParams{};
  const ModelParams s = swanson(0.5, 0.2, 0.2);
  for (const auto& m : {d, s}) {
    const auto r = q_space_energies(m, 2000, 8);
    for (int n = 0; n < 8; ++n) {
      const double e = closed_form_energy(n, m).real();
      EXPECT_NEAR(r.eigenvalues[n].real(), e, tolerance::q_space_agreement * e) << model_name(m) << " " << n;
    }
  }
}

// ---------------------------------------------------------------------------
// classification

TEST(Classify, Examples) {
  const auto real = classify_spectrum({1.0, 2.0, complex(3.0, 1e-12)}, 1e-7);
  for (auto t : real) EXPECT_EQ(t, EigenTag::real);
  const auto pair = classify_spectrum({complex(1.0, 2.0), complex(1.0, -2.0)}, 1e-7);
  EXPECT_EQ(pair[0], EigenTag::conjugate_pair);
  EXPECT_EQ(pair[1], EigenTag::conjugate_pair);
  EXPECT_EQ(classify_spectrum({complex(1.0, 2.0)}, 1e-7)[0], EigenTag::unclassified);
  const auto mixed = classify_spectrum({complex(1.0, 2.0), 0.5, complex(1.0, -2.0), complex(4.0, 1.0)}, 1e-7);
  EXPECT_EQ(mixed[0], EigenTag::conjugate_pair);
  EXPECT_EQ(mixed[1], EigenTag::real);
  EXPECT_EQ(mixed[2], EigenTag::conjugate_pair);
  EXPECT_EQ(mixed[3], EigenTag::unclassified);
  EXPECT_EQ(to_string(EigenTag::conjugate_pair), "conjugate-pair");
}

// ---------------------------------------------------------------------------
// p space

TEST(PSpace, PlainOscillatorLevels) {
  const auto c = plain_oscillator();
  const auto a = build_p_space_matrix(c, MomentumGrid::symmetric(12.0, 1201));
  const auto r = solve_p_space(a, 6);
  ASSERT_EQ(r.eigenvalues.size(), 6u);
  for (int n = 0; n < 6; ++n) EXPECT_NEAR(r.eigenvalues[n].real(), 2.0 * n + 1.0, 1e-6);
  EXPECT_TRUE(r.all_real());
}

TEST(PSpace, DisplacedMatrixIsReal) {
  const auto a = build_p_space_matrix(displaced_coefficients(DisplacedOscillatorParams{}), MomentumGrid::symmetric(10.0, 101));
  EXPECT_TRUE(linalg::is_real(a));
}

TEST(PSpace, MirrorRelabelingPreservesSpectrum) {
  // Reversing p conjugates the matrix by a permutation; with lambda -> -lambda
  // the coefficients map onto themselves, so both spectra coincide.
  const auto grid = MomentumGrid::symmetric(15.0, 301);
  DisplacedOscillatorParams a, b;
  b.lambda = -a.lambda;
  const Eigen::MatrixXcd ma = build_p_space_matrix(displaced_coefficients(a), grid);
  const Eigen::MatrixXcd mb = build_p_space_matrix(displaced_coefficients(b), grid);
  const Eigen::Index n = ma.rows();
  Eigen::MatrixXcd flipped(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) flipped(i, j) = mb(n - 1 - i, n - 1 - j);
  EXPECT_LT((flipped - ma).cwiseAbs().maxCoeff(), 1e-12 * ma.cwiseAbs().maxCoeff());
  auto ea = linalg::eigenvalues(ma), eb = linalg::eigenvalues(mb);
  auto by_re = [](complex x, complex y) { return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag(); };
  std::sort(ea.begin(), ea.end(), by_re);
  std::sort(eb.begin(), eb.end(), by_re);
  for (int k = 0; k < 6; ++k) EXPECT_NEAR(std::abs(ea[k] - eb[k]), 0.0, 1e-9 * std::abs(ea[k]));
}

TEST(PSpace, DisplacedDirichletOnWideBox) {
  const DisplacedOscillatorParams prm;
  const auto c = displaced_coefficients(prm);
  PSpaceOptions opt;
  opt.p_max = 60.0;
  opt.points = 3000;
  opt.closure = PClosure::dirichlet;
  const auto r = p_space_spectrum(c, 6, opt);
  ASSERT_EQ(r.eigenvalues.size(), 6u);
  EXPECT_TRUE(r.all_real());
  for (int n = 0; n < 6; ++n) {
    const double e = displaced_energy(n, prm);
    EXPECT_NEAR(r.eigenvalues[n].real(), e, tolerance::p_space_agreement * e) << n;
  }
}

TEST(PSpace, DisplacedAsymptoticClosureIsRealAndAccurate) {
  for (double lambda : {0.0, 0.5, 1.5}) {
    DisplacedOscillatorParams prm;
    prm.lambda = lambda;
    PSpaceOptions opt;
    opt.p_max = 15.0;
    opt.points = 1200;
    const auto r = p_space_energies(prm, 6, opt);
    ASSERT_GE(r.eigenvalues.size(), 6u);
    EXPECT_TRUE(r.all_real()) << lambda;
    for (int n = 0; n < 6; ++n) {
      const double e = displaced_energy(n, prm);
      EXPECT_NEAR(r.eigenvalues[n].real(), e, tolerance::oracle_agreement * e) << lambda << " " << n;
    }
  }
}

TEST(PSpace, SwansonBelowCriticalIsReal) {
  const auto r = p_space_energies(swanson(1.9, 0.2, 0.2), 6);
  ASSERT_GE(r.eigenvalues.size(), 6u);
  EXPECT_TRUE(r.all_real());
  for (int n = 0; n < 6; ++n) {
    const double e = swanson_energy(n, swanson(1.9, 0.2, 0.2)).real();
    EXPECT_NEAR(r.eigenvalues[n].real(), e, tolerance::oracle_agreement * e) << n;
  }
}

TEST(PSpace, SwansonAboveCriticalHasConjugatePair) {
  const auto r = p_space_energies(swanson(2.1, 0.2, 0.2), 4);
  EXPECT_TRUE(r.has_conjugate_pair());
  double max_im = 0.0;
  for (auto e : r.eigenvalues) max_im = std::max(max_im, std::abs(e.imag()));
  EXPECT_GT(max_im, 10.0 * tolerance::classification);
  const complex e0 = swanson_energy(0, swanson(2.1, 0.2, 0.2));
  double best = INFINITY;
  for (auto e : r.eigenvalues) best = std::min(best, std::abs(e - e0));
  EXPECT_LT(best, 1e-3 * std::abs(e0));
}

TEST(PSpace, IndicialExponent) {
  // f4 s^2 + (f4 + g3) s - h2 = 0 with f4 = 1, g3 = -3, h2 = 2: s^2 - 2s - 2 = 0.
  const complex s = indicial_exponent(PowerLawAsymptotics{1.0, -3.0, 2.0});
  EXPECT_NEAR(s.real(), 1.0 + std::sqrt(3.0), 1e-14);
  EXPECT_EQ(s.imag(), 0.0);
  const complex z = indicial_exponent(PowerLawAsymptotics{1.0, -3.0, -2.0});
  EXPECT_NEAR(z.real(), 1.0, 1e-14);
  EXPECT_NEAR(z.imag(), 1.0, 1e-14);
  EXPECT_NEAR(indicial_exponent(PowerLawAsymptotics{1.0, -3.0, -2.0}, true).imag(), -1.0, 1e-14);
}

TEST(Tail, PolynomialsOfTheModels) {
  const auto t = tail_polynomials(displaced_coefficients(DisplacedOscillatorParams{{1.0, 0.2, 0.05}, 1.0, 1.0, 0.5}));
  ASSERT_TRUE(t.has_value());
  // f = (1 + 0.2 p^2)^2, g = -2 (1 + 0.2 p^2)(0.25 p + 0.5), h = (1 - 0.0125) p^2 - 0.05 p.
  const std::array<double, 5> f{1.0, 0.0, 0.4, 0.0, 0.04}, g{-1.0, -0.5, -0.2, -0.1, 0.0}, h{0.0, -0.05, 0.9875, 0.0, 0.0};
  for (std::size_t j = 0; j < 5; ++j) {
    EXPECT_NEAR(t->f[j], f[j], 1e-13) << j;
    EXPECT_NEAR(t->g[j], g[j], 1e-13) << j;
    EXPECT_NEAR(t->h[j], h[j], 1e-13) << j;
  }
  EXPECT_TRUE(tail_polynomials(swanson_coefficients(swanson(1.9, 0.2, 0.2))).has_value());
  EXPECT_FALSE(tail_polynomials(plain_oscillator()).has_value());
}

TEST(Tail, SeriesReducesTheTailResidual) {
  const auto c = swanson_coefficients(swanson(1.9, 0.2, 0.2));
  const auto t = *tail_polynomials(c);
  const complex s = indicial_exponent(*c.asymptotics());
  const double eps = 3.0;
  for (int side : {-1, 1}) {
    const auto series = tail_series(t, s, eps, side);
    ASSERT_GE(series.size(), 3u);
    // psi = |p|^(-s) sum c_m |p|^(-m); residual of -f psi'' + g psi' + (h - eps) psi relative to h psi.
    auto residual = [&](double p, std::size_t terms) {
      const double a = std::abs(p);
      complex v = 0.0, dv = 0.0, ddv = 0.0;
      for (std::size_t m = 0; m < terms; ++m) {
        const complex k = s + static_cast<double>(m);
        v += series[m] * std::pow(a, -k);
        dv += -k * series[m] * std::pow(a, -k - 1.0);
        ddv += k * (k + 1.0) * series[m] * std::pow(a, -k - 2.0);
      }
      const double sg = p < 0.0 ? -1.0 : 1.0;
      const complex r = -c.f(p) * ddv + c.g(p) * sg * dv + (c.h(p) - eps) * v;
      return std::abs(r) / std::abs(c.h(p) * v);
    };
    const double p = 40.0 * side;
    EXPECT_LT(residual(p, series.size()), 1e-3 * residual(p, 1)) << side;
  }
}

TEST(Tail, RefinedLevelsDoNotDependOnTheWindow) {
  // Same spacing, different truncation.
  PSpaceOptions narrow, wide;
  narrow.p_max = 20.0;
  narrow.points = 801;
  wide.p_max = 30.0;
  wide.points = 1201;
  const auto a = p_space_energies(swanson(1.9, 0.2, 0.2), 5, narrow);
  const auto b = p_space_energies(swanson(1.9, 0.2, 0.2), 5, wide);
  for (int n = 0; n < 5; ++n)
    EXPECT_NEAR(a.eigenvalues[n].real(), b.eigenvalues[n].real(), 1e-7 * a.eigenvalues[n].real()) << n;
  PSpaceOptions bare = narrow;
  bare.refine_tail = false;
  const auto c = p_space_energies(swanson(1.9, 0.2, 0.2), 5, bare);
  EXPECT_GT(std::abs(c.eigenvalues[4] - a.eigenvalues[4]), 1e3 * 1e-7 * a.eigenvalues[4].real());
}

// ---------------------------------------------------------------------------
// operator-composed Hamiltonians

TEST(OperatorHamiltonian, AgreesWithCoefficientMatrix) {
  const auto grid = MomentumGrid::symmetric(20.0, 1000);
  for (const ModelParams& m : {ModelParams{DisplacedOscillatorParams{}}, ModelParams{swanson(0.5, 0.3, 0.1)}}) {
    // Swanson tails are still 1e-2 of the peak at |p| = 20, so only the roughness filter applies.
    ModeFilter filter;
    filter.check_edges = false;
    const auto op = solve_p_space(build_operator_hamiltonian(m, grid), 4, 1e-7, filter);
    // Same grid; the coefficient matrix keeps its tail closure.
    PSpaceOptions opt;
    opt.p_max = 20.0;
    opt.points = 1000;
    const auto coeff = p_space_energies(m, 4, opt);
    ASSERT_EQ(op.eigenvalues.size(), 4u);
    ASSERT_EQ(coeff.eigenvalues.size(), 4u);
    for (int n = 0; n < 4; ++n) {
      const complex e = coeff.eigenvalues[n];
      EXPECT_NEAR(std::abs(op.eigenvalues[n] - e), 0.0, tolerance::p_space_agreement * std::abs(e))
          << model_name(m) << " " << n;
    }
  }
}

TEST(OperatorHamiltonian, UncoupledSwansonIsSelfAdjointUnderTheMeasure) {
  const auto grid = MomentumGrid::symmetric(20.0, 801);
  const SwansonParams s = swanson(0.5, 0.0, 0.0);
  const auto h = build_operator_hamiltonian(s, grid);
  EXPECT_LT(hermiticity_defect(h, s.deformation, grid), tolerance::hermitian_adjoint);
}

TEST(OperatorHamiltonian, UnshiftedDisplacedMatchesClosedForm) {
  const DisplacedOscillatorParams prm{{1.0, 0.1, 0.0}, 1.0, 1.0, 0.0};
  const auto r = solve_p_space(build_operator_hamiltonian(prm, MomentumGrid::symmetric(30.0, 2000)), 5);
  ASSERT_EQ(r.eigenvalues.size(), 5u);
  for (int n = 0; n < 5; ++n)
    EXPECT_NEAR(r.eigenvalues[n].real(), displaced_energy(n, prm), tolerance::p_space_agreement * displaced_energy(n, prm));
}

// ---------------------------------------------------------------------------
// independent oracles agree across a parameter matrix

TEST(Oracles, QSpacePSpaceAndClosedFormAgree) {
  std::vector<ModelParams> cases;
  for (double beta : {0.05, 0.2})
    for (double lambda : {0.3, 1.0}) cases.push_back(DisplacedOscillatorParams{{1.0, beta, 0.0}, 1.0, 1.0, lambda});
  cases.push_back(DisplacedOscillatorParams{{1.0, 0.1, 0.05}, 1.5, 0.8, 0.4});
  cases.push_back(swanson(0.5, 0.3, 0.1));
  cases.push_back(swanson(1.0, 0.1, 0.25));
  for (const auto& m : cases) {
    PSpaceOptions opt;
    if (std::holds_alternative<DisplacedOscillatorParams>(m)) {
      opt.p_max = 15.0;
      opt.points = 1200;
    }
    const auto q = q_space_energies(m, 2000, 4);
    const auto p = p_space_energies(m, 4, opt);
    ASSERT_GE(p.eigenvalues.size(), 4u);
    for (int n = 0; n < 4; ++n) {
      const double e = closed_form_energy(n, m).real();
      EXPECT_NEAR(q.eigenvalues[n].real(), e, tolerance::q_space_agreement * e);
      EXPECT_NEAR(std::abs(p.eigenvalues[n] - q.eigenvalues[n]), 0.0, tolerance::oracle_agreement * e)
          << model_name(m) << " " << n;
    }
  }
}
