#ifndef MLQM_EIGENSOLVER_HPP
#define MLQM_EIGENSOLVER_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "mlqm/deformed_algebra.hpp"
#include "mlqm/dense_eigen.hpp"
#include "mlqm/models.hpp"
#include "mlqm/pct.hpp"

namespace mlqm {

enum class EigenTag { real, conjugate_pair, unclassified };
enum class SpectrumSource { closed_form, q_space, p_space };

inline std::string to_string(EigenTag t) {
  switch (t) {
  case EigenTag::real: return "real";
  case EigenTag::conjugate_pair: return "conjugate-pair";
  case EigenTag::unclassified: return "unclassified";
  }
  return "unknown";
}

inline std::string to_string(SpectrumSource s) {
  switch (s) {
  case SpectrumSource::closed_form: return "closed-form";
  case SpectrumSource::q_space: return "q-space-numeric";
  case SpectrumSource::p_space: return "p-space-numeric";
  }
  return "unknown";
}

struct SpectrumResult {
  std::vector<complex> eigenvalues; ///< sorted by real part
  std::vector<EigenTag> tags;
  SpectrumSource source = SpectrumSource::closed_form;
  std::size_t resolution = 0;

  bool all_real() const {
    return std::all_of(tags.begin(), tags.end(), [](EigenTag t) { return t == EigenTag::real; });
  }
  bool has_conjugate_pair() const {
    return std::any_of(tags.begin(), tags.end(), [](EigenTag t) { return t == EigenTag::conjugate_pair; });
  }
};

/// Tags each eigenvalue: real when |Im| <= tol max(1, |Re|); otherwise paired
/// greedily with the closest unused partner within tol of its conjugate.
inline std::vector<EigenTag> classify_spectrum(const std::vector<complex>& eigs, double tol) {
  if (!(tol > 0.0)) throw invalid_argument("classification tolerance must be positive");
  const std::size_t n = eigs.size();
  std::vector<EigenTag> tags(n, EigenTag::unclassified);
  auto scale = [](complex z) { return std::max(1.0, std::abs(z.real())); };
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(eigs[i].imag()) <= tol * scale(eigs[i])) tags[i] = EigenTag::real;
  std::vector<bool> used(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (tags[i] == EigenTag::real || used[i]) continue;
    std::size_t best = n;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || used[j] || tags[j] == EigenTag::real) continue;
      const double d = std::abs(eigs[j] - std::conj(eigs[i]));
      if (d <= tol * scale(eigs[i]) && d < best_d) {
        best = j;
        best_d = d;
      }
    }
    if (best < n) {
      used[i] = used[best] = true;
      tags[i] = tags[best] = EigenTag::conjugate_pair;
    }
  }
  return tags;
}

namespace detail {

inline void sort_by_real(std::vector<complex>& v) {
  std::sort(v.begin(), v.end(), [](complex a, complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
}

inline SpectrumResult make_result(std::vector<complex> eigs, SpectrumSource src, std::size_t resolution,
                                  double tol) {
  sort_by_real(eigs);
  SpectrumResult r;
  r.tags = classify_spectrum(eigs, tol);
  r.eigenvalues = std::move(eigs);
  r.source = src;
  r.resolution = resolution;
  return r;
}

} // namespace detail

// ---------------------------------------------------------------------------
// q space

/// Lowest n_levels eigenvalues of the second-order finite-difference
/// discretization of -d^2/dq^2 + V with n_intervals intervals and Dirichlet
/// ends, by Sturm-sequence bisection on the symmetric tridiagonal matrix.
inline std::vector<double> q_space_levels(const TransformedProblem& problem, std::size_t n_intervals, int n_levels) {
  if (!std::isfinite(problem.q_min) || !std::isfinite(problem.q_max))
    throw invalid_argument("q-space solver needs a finite q interval");
  if (n_levels < 0) throw invalid_argument("n_levels must be non-negative");
  const std::size_t m = n_intervals - 1;
  const double h = (problem.q_max - problem.q_min) / static_cast<double>(n_intervals);
  const double off = -1.0 / (h * h);
  std::vector<double> diag(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double v = problem.potential(problem.q_min + h * static_cast<double>(i + 1));
    if (!std::isfinite(v)) throw numeric_error("potential is not finite at an interior grid point");
    diag[i] = 2.0 / (h * h) + v;
  }
  const double v_mid = diag[m / 2];
  if (diag.front() < v_mid || diag.back() < v_mid)
    throw model_error("potential does not rise toward the ends of the q interval");

  // Number of eigenvalues below x.
  auto count = [&](double x) {
    std::size_t c = 0;
    double d = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      d = (diag[i] - x) - (i == 0 ? 0.0 : off * off / d);
      if (d == 0.0) d = -std::numeric_limits<double>::min();
      if (d < 0.0) ++c;
    }
    return c;
  };

  const double lower = *std::min_element(diag.begin(), diag.end()) - 2.0 * std::abs(off);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_levels));
  for (int k = 0; k < n_levels; ++k) {
    const auto target = static_cast<std::size_t>(k) + 1;
    double lo = out.empty() ? lower : out.back() - 1e-12 * std::max(1.0, std::abs(out.back()));
    while (count(lo) >= target) lo -= std::max(1.0, std::abs(lo));
    double step = std::max(1.0, std::abs(lo));
    double hi = lo + step;
    while (count(hi) < target) {
      step *= 2.0;
      hi = lo + step;
    }
    for (int it = 0; it < 300; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (count(mid) >= target ? hi : lo) = mid;
    }
    out.push_back(0.5 * (lo + hi));
  }
  return out;
}

/// q-space levels, Richardson-extrapolated from n_grid and 2 n_grid intervals.
inline SpectrumResult solve_q_space(const TransformedProblem& problem, std::size_t n_grid, int n_levels) {
  if (n_grid < 64) throw invalid_grid("q-space solver needs n_grid >= 64");
  if (n_levels < 0) throw invalid_argument("n_levels must be non-negative");
  if (static_cast<std::size_t>(n_levels) > n_grid / 4)
    throw numeric_error("resolution too low: n_levels exceeds n_grid/4");
  const auto coarse = q_space_levels(problem, n_grid, n_levels);
  const auto fine = q_space_levels(problem, 2 * n_grid, n_levels);
  std::vector<complex> eps(coarse.size());
  for (std::size_t i = 0; i < eps.size(); ++i) eps[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
  return detail::make_result(std::move(eps), SpectrumSource::q_space, n_grid, 1e-7);
}

/// q-space spectrum of a model, mapped to energies E.
inline SpectrumResult q_space_energies(const ModelParams& model, std::size_t n_grid, int n_levels) {
  const TransformedProblem problem = transformed_problem(model);
  SpectrumResult r = solve_q_space(problem, n_grid, n_levels);
  for (auto& e : r.eigenvalues) e = problem.energy_map.to_energy_c(e);
  return r;
}

// ---------------------------------------------------------------------------
// p space

/// Treatment of stencil entries that reach past the grid ends.
enum class PClosure {
  dirichlet, ///< dropped (function taken as zero outside)
  asymptotic ///< extended with the power law |p|^(-s) of the decaying solution
};

/// f, g, h as polynomials in p (coefficient of p^j at index j).
struct TailPolynomials {
  std::array<double, 5> f{}, g{}, h{};
};

/// Polynomial coefficients of f (degree 4), g (3) and h (2) matching the
/// leading asymptotics; nullopt when the coefficients are not of that form.
inline std::optional<TailPolynomials> tail_polynomials(const CoefficientSet& c) {
  if (!c.asymptotics()) return std::nullopt;
  Eigen::Matrix<double, 5, 5> v;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) v(i, j) = std::pow(static_cast<double>(i - 2), j);
  const auto lu = v.fullPivLu();
  auto fit = [&](auto&& fn) {
    Eigen::Matrix<double, 5, 1> y;
    for (int i = 0; i < 5; ++i) y[i] = fn(static_cast<double>(i - 2));
    const Eigen::Matrix<double, 5, 1> x = lu.solve(y);
    std::array<double, 5> out{};
    for (int j = 0; j < 5; ++j) out[static_cast<std::size_t>(j)] = x[j];
    return out;
  };
  TailPolynomials t;
  t.f = fit([&](double p) { return c.f(p); });
  t.g = fit([&](double p) { return c.g(p); });
  t.h = fit([&](double p) { return c.h(p); });
  const auto& a = *c.asymptotics();
  auto close = [](double x, double y, double scale) { return std::abs(x - y) <= 1e-9 * std::max(scale, 1.0); };
  const double scale = std::abs(a.f4) + std::abs(a.g3) + std::abs(a.h2);
  if (!close(t.f[4], a.f4, scale) || !close(t.g[3], a.g3, scale) || !close(t.h[2], a.h2, scale) ||
      !close(t.g[4], 0.0, scale) || !close(t.h[3], 0.0, scale) || !close(t.h[4], 0.0, scale))
    return std::nullopt;
  t.g[4] = t.h[3] = t.h[4] = 0.0;
  auto eval = [](const std::array<double, 5>& k, double p) {
    return k[0] + p * (k[1] + p * (k[2] + p * (k[3] + p * k[4])));
  };
  for (double p : {-7.3, -3.1, 0.45, 2.9, 8.6}) {
    if (!close(eval(t.f, p), c.f(p), std::abs(c.f(p))) || !close(eval(t.g, p), c.g(p), std::abs(c.g(p))) ||
        !close(eval(t.h, p), c.h(p), std::abs(c.h(p))))
      return std::nullopt;
  }
  return t;
}

/// Coefficients c_0 = 1, c_1, ... of the decaying solution
/// |p|^(-s) sum_m c_m |p|^(-m) at eigenvalue eps, for p -> +inf (side = +1)
/// or p -> -inf (side = -1). The series stops before a resonant order.
inline std::vector<complex> tail_series(const TailPolynomials& t, complex s, complex eps, int side, int order = 4) {
  std::array<double, 5> f{}, g{};
  std::array<complex, 5> h{};
  for (int j = 0; j < 5; ++j) {
    const double sj = side > 0 || j % 2 == 0 ? 1.0 : -1.0;
    // With p = -t, d/dp = -d/dt flips the sign of the first-derivative term once more.
    f[static_cast<std::size_t>(j)] = t.f[static_cast<std::size_t>(j)] * sj;
    g[static_cast<std::size_t>(j)] = t.g[static_cast<std::size_t>(j)] * (side > 0 ? 1.0 : -sj);
    h[static_cast<std::size_t>(j)] = t.h[static_cast<std::size_t>(j)] * sj;
  }
  h[0] -= eps;
  auto denom = [&](int m) {
    const complex r = s + static_cast<double>(m);
    return -f[4] * r * (r + 1.0) - g[3] * r + h[2];
  };
  std::vector<complex> c{complex(1.0)};
  for (int m = 1; m <= order; ++m) {
    complex sum = 0.0;
    for (int k = 0; k < m; ++k) {
      const complex r = s + static_cast<double>(k);
      const int jf = k + 4 - m, jg = k + 3 - m, jh = k + 2 - m;
      if (jf >= 0) sum -= f[static_cast<std::size_t>(jf)] * r * (r + 1.0) * c[static_cast<std::size_t>(k)];
      if (jg >= 0) sum -= g[static_cast<std::size_t>(jg)] * r * c[static_cast<std::size_t>(k)];
      if (jh >= 0) sum += h[static_cast<std::size_t>(jh)] * c[static_cast<std::size_t>(k)];
    }
    const complex d = denom(m);
    if (std::abs(d) <= 1e-12 * (std::abs(f[4]) * std::norm(s + static_cast<double>(m)) + 1.0)) break;
    c.push_back(-sum / d);
  }
  return c;
}

/// Root of the indicial equation f4 s^2 + (f4 + g3) s - h2 = 0 with the
/// larger real part; with complex roots, the one with Im s > 0 (or < 0 for
/// the conjugate branch).
inline complex indicial_exponent(const PowerLawAsymptotics& a, bool conjugate_branch = false) {
  if (!(a.f4 > 0.0)) throw invalid_argument("indicial exponent needs f4 > 0");
  const double b = a.f4 + a.g3;
  double disc = b * b + 4.0 * a.f4 * a.h2;
  if (std::abs(disc) <= 1e-12 * std::max(b * b, std::abs(4.0 * a.f4 * a.h2))) disc = 0.0;
  if (disc >= 0.0) return complex((-b + std::sqrt(disc)) / (2.0 * a.f4), 0.0);
  const double im = std::sqrt(-disc) / (2.0 * a.f4);
  return complex(-b / (2.0 * a.f4), conjugate_branch ? -im : im);
}

/// Matrix of -f d^2/dp^2 + g d/dp + h with 4th-order central stencils.
/// The result acts on eps, not E. With the asymptotic closure and
/// `closure_eps`, ghost values follow the tail series at that eigenvalue
/// instead of the bare power law.
inline Eigen::MatrixXcd build_p_space_matrix(const CoefficientSet& coeffs, const MomentumGrid& grid,
                                             PClosure closure = PClosure::dirichlet, bool conjugate_branch = false,
                                             std::optional<complex> closure_eps = std::nullopt) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  if (n < 5) throw invalid_grid("p-space matrix needs at least 5 grid points");
  const auto p = grid.points();
  const double h = grid.spacing();
  complex s = 0.0;
  if (closure == PClosure::asymptotic) {
    if (!coeffs.asymptotics()) throw invalid_argument("asymptotic closure needs the leading asymptotics");
    if (!(p.front() < 0.0 && p.back() > 0.0)) throw invalid_grid("asymptotic closure needs a grid spanning p = 0");
    s = indicial_exponent(*coeffs.asymptotics(), conjugate_branch);
  }
  std::vector<complex> left{complex(1.0)}, right{complex(1.0)};
  if (closure == PClosure::asymptotic && closure_eps) {
    if (const auto t = tail_polynomials(coeffs)) {
      left = tail_series(*t, s, *closure_eps, -1);
      right = tail_series(*t, s, *closure_eps, +1);
    }
  }
  auto tail = [&](double p_abs, const std::vector<complex>& c) {
    complex sum = 0.0;
    for (std::size_t m = c.size(); m-- > 0;) sum = sum / p_abs + c[m];
    return std::exp(-s * std::log(p_abs)) * sum;
  };
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double fi = coeffs.f(p[i]), gi = coeffs.g(p[i]);
    a(i, i) += coeffs.h(p[i]);
    for (int k = 0; k < 5; ++k) {
      const double w = -fi * stencil::second[k] / (12.0 * h * h) + gi * stencil::central[k] / (12.0 * h);
      const Eigen::Index j = i + k - 2;
      if (j >= 0 && j < n) {
        a(i, j) += w;
      } else if (closure == PClosure::asymptotic) {
        const Eigen::Index edge = j < 0 ? 0 : n - 1;
        const double pj = j < 0 ? p.front() + static_cast<double>(j) * h : p.back() + static_cast<double>(j - n + 1) * h;
        const auto& c = j < 0 ? left : right;
        a(i, edge) += w * tail(std::abs(pj), c) / tail(std::abs(p[static_cast<std::size_t>(edge)]), c);
      }
    }
  }
  return a;
}

namespace detail {

inline Eigen::SparseMatrix<complex> sparse_position(const DeformationParams& d, const MomentumGrid& grid) {
  const Eigen::MatrixXcd x = position_matrix(d, grid, StencilClosure::dirichlet);
  return x.sparseView();
}

inline Eigen::SparseMatrix<complex> sparse_identity(Eigen::Index n) {
  Eigen::SparseMatrix<complex> id(n, n);
  id.setIdentity();
  return id;
}

inline Eigen::SparseMatrix<complex> sparse_momentum(const MomentumGrid& grid) {
  const auto p = grid.points();
  const auto n = static_cast<Eigen::Index>(p.size());
  Eigen::SparseMatrix<complex> m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m.insert(i, i) = p[static_cast<std::size_t>(i)];
  return m;
}

} // namespace detail

/// H composed literally from the x and p matrices (Dirichlet stencils), in
/// energy units.
inline Eigen::MatrixXcd build_operator_hamiltonian(const DisplacedOscillatorParams& prm, const MomentumGrid& grid) {
  prm.validate();
  const auto x = detail::sparse_position(prm.deformation, grid);
  const auto p = detail::sparse_momentum(grid);
  const double w2 = prm.omega * prm.omega;
  Eigen::SparseMatrix<complex> h = (p * p) * complex(0.5 / prm.mu) + (x * x) * complex(0.5 * prm.mu * w2) +
                                   x * complex(0.0, prm.lambda);
  return Eigen::MatrixXcd(h);
}

/// Swanson H = omega a^dag a + lambda a^2 + delta a^dag^2 + omega/2 with
/// a = (p - i m omega x)/sqrt(2 m hbar omega).
inline Eigen::MatrixXcd build_operator_hamiltonian(const SwansonParams& prm, const MomentumGrid& grid) {
  prm.validate();
  const auto x = detail::sparse_position(prm.deformation, grid);
  const auto p = detail::sparse_momentum(grid);
  const complex norm = 1.0 / std::sqrt(2.0 * prm.m * prm.deformation.hbar * prm.omega);
  const complex imw(0.0, prm.m * prm.omega);
  const Eigen::SparseMatrix<complex> a = (p - x * imw) * norm;
  const Eigen::SparseMatrix<complex> ad = (p + x * imw) * norm;
  Eigen::SparseMatrix<complex> h = (ad * a) * complex(prm.omega) + (a * a) * complex(prm.lambda) +
                                   (ad * ad) * complex(prm.delta) +
                                   detail::sparse_identity(a.rows()) * complex(0.5 * prm.omega);
  return Eigen::MatrixXcd(h);
}

inline Eigen::MatrixXcd build_operator_hamiltonian(const ModelParams& m, const MomentumGrid& grid) {
  return std::visit([&grid](const auto& prm) { return build_operator_hamiltonian(prm, grid); }, m);
}

/// Rejection rules for grid artefacts among the eigenpairs of a p-space matrix.
struct ModeFilter {
  bool check_edges = true;      ///< demand edge amplitude below edge_ratio (Dirichlet matrices)
  double edge_ratio = 1e-6;
  int edge_width = 2;
  double max_roughness = 0.25;  ///< grid-scale oscillation, see linalg::roughness
};

/// Dense eigensolve; keeps the n_levels eigenvalues of smallest real part
/// whose eigenvectors pass the filter.
inline SpectrumResult solve_p_space(const Eigen::MatrixXcd& matrix, int n_levels, double tol = 1e-7,
                                    const ModeFilter& filter = {}) {
  if (matrix.rows() != matrix.cols()) throw invalid_argument("solve_p_space needs a square matrix");
  if (n_levels < 0) throw invalid_argument("n_levels must be non-negative");
  std::vector<complex> all = linalg::eigenvalues(matrix);
  detail::sort_by_real(all);
  const int bw = linalg::bandwidth(matrix);
  std::vector<complex> kept;
  for (const complex& e : all) {
    if (static_cast<int>(kept.size()) >= n_levels) break;
    const Eigen::VectorXcd v = linalg::inverse_iteration(matrix, e, bw);
    if (linalg::roughness(v) > filter.max_roughness) continue;
    if (filter.check_edges && linalg::edge_amplitude(v, filter.edge_width) >= filter.edge_ratio) continue;
    kept.push_back(e);
  }
  return detail::make_result(std::move(kept), SpectrumSource::p_space, static_cast<std::size_t>(matrix.rows()),
                             tol);
}

struct PSpaceOptions {
  double p_max = 20.0;
  std::size_t points = 1001;
  PClosure closure = PClosure::asymptotic;
  double tol = 1e-7;
  ModeFilter filter{};
  bool refine_tail = true; ///< re-solve each level with the tail series at its own eigenvalue
};

namespace detail {

/// Fixed point eps = eig(A(eps)) for the eigenvalue-dependent tail closure,
/// started from each level of the power-law closure.
inline void refine_tail_levels(std::vector<complex>& levels, const CoefficientSet& coeffs, const MomentumGrid& grid,
                               bool conjugate_branch) {
  if (!tail_polynomials(coeffs)) return;
  for (complex& e : levels) {
    const complex start = e;
    complex cur = e;
    for (int it = 0; it < 30; ++it) {
      const Eigen::MatrixXcd a = build_p_space_matrix(coeffs, grid, PClosure::asymptotic, conjugate_branch, cur);
      const complex next = linalg::refine_eigenvalue(a, cur, 2);
      const bool done = std::abs(next - cur) <= 1e-14 * std::max(1.0, std::abs(cur));
      cur = next;
      if (done) break;
    }
    // A jump beyond the closure correction means the iteration left the level.
    if (std::isfinite(cur.real()) && std::isfinite(cur.imag()) &&
        std::abs(cur - start) <= 1e-2 * std::max(1.0, std::abs(start)))
      e = cur;
  }
}

} // namespace detail

/// Energies E_n from the coefficient matrix. With the asymptotic closure and
/// a complex indicial exponent, both conjugate branches are solved and merged.
inline SpectrumResult p_space_spectrum(const CoefficientSet& coeffs, int n_levels, const PSpaceOptions& opt = {}) {
  const MomentumGrid grid = MomentumGrid::symmetric(opt.p_max, opt.points);
  PClosure closure = opt.closure;
  if (closure == PClosure::asymptotic && (!coeffs.asymptotics() || !(coeffs.asymptotics()->f4 > 0.0)))
    closure = PClosure::dirichlet;
  ModeFilter filter = opt.filter;
  if (closure == PClosure::asymptotic) filter.check_edges = false;

  const bool refine = closure == PClosure::asymptotic && opt.refine_tail;
  SpectrumResult r = solve_p_space(build_p_space_matrix(coeffs, grid, closure), n_levels, opt.tol, filter);
  if (refine) detail::refine_tail_levels(r.eigenvalues, coeffs, grid, false);
  if (closure == PClosure::asymptotic && indicial_exponent(*coeffs.asymptotics()).imag() != 0.0) {
    SpectrumResult c = solve_p_space(build_p_space_matrix(coeffs, grid, closure, true), n_levels, opt.tol, filter);
    if (refine) detail::refine_tail_levels(c.eigenvalues, coeffs, grid, true);
    std::vector<complex> merged = r.eigenvalues;
    merged.insert(merged.end(), c.eigenvalues.begin(), c.eigenvalues.end());
    r = detail::make_result(std::move(merged), SpectrumSource::p_space, grid.size(), opt.tol);
  } else if (refine) {
    r = detail::make_result(std::move(r.eigenvalues), SpectrumSource::p_space, grid.size(), opt.tol);
  }
  for (auto& e : r.eigenvalues) e = coeffs.energy_map().to_energy_c(e);
  r.tags = classify_spectrum(r.eigenvalues, opt.tol);
  return r;
}

inline SpectrumResult p_space_energies(const ModelParams& model, int n_levels, const PSpaceOptions& opt = {}) {
  return p_space_spectrum(coefficients(model), n_levels, opt);
}

} // namespace mlqm

#endif
