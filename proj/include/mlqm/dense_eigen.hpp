#ifndef MLQM_DENSE_EIGEN_HPP
#define MLQM_DENSE_EIGEN_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#ifndef lapack_complex_float
#define lapack_complex_float std::complex<float>
#endif
#ifndef lapack_complex_double
#define lapack_complex_double std::complex<double>
#endif
#include <lapacke.h>

#include "mlqm/deformation.hpp"
#include "mlqm/errors.hpp"

extern "C" void openblas_set_num_threads(int) __attribute__((weak));

namespace mlqm::linalg {

namespace detail {

// Keep each solve single-threaded (and therefore deterministic) when the
// LAPACK backend is OpenBLAS.
inline void single_threaded_backend() {
  static const bool done = [] {
    if (openblas_set_num_threads) openblas_set_num_threads(1);
    return true;
  }();
  (void)done;
}

inline std::string diagnostics(const char* routine, lapack_int info, const Eigen::MatrixXcd& a) {
  return std::string(routine) + " failed (info=" + std::to_string(info) + ", n=" + std::to_string(a.rows()) +
         ", frobenius=" + std::to_string(a.norm()) + ")";
}

} // namespace detail

inline bool is_real(const Eigen::MatrixXcd& a) { return a.imag().cwiseAbs().maxCoeff() == 0.0; }

/// Eigenvalues of a general square matrix (LAPACK ?geev, no eigenvectors).
/// Real matrices go through dgeev.
inline std::vector<complex> eigenvalues(const Eigen::MatrixXcd& a) {
  if (a.rows() != a.cols()) throw invalid_argument("eigenvalues of a non-square matrix");
  const auto n = static_cast<lapack_int>(a.rows());
  if (n == 0) return {};
  detail::single_threaded_backend();
  if (!a.allFinite()) throw numeric_error(detail::diagnostics("geev input check", -1, a));
  std::vector<complex> out(static_cast<std::size_t>(n));
  if (is_real(a)) {
    Eigen::MatrixXd r = a.real();
    std::vector<double> wr(n), wi(n);
    const lapack_int info =
        LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, r.data(), n, wr.data(), wi.data(), nullptr, 1, nullptr, 1);
    if (info != 0) throw numeric_error(detail::diagnostics("dgeev", info, a));
    for (lapack_int i = 0; i < n; ++i) out[i] = complex(wr[i], wi[i]);
  } else {
    Eigen::MatrixXcd c = a;
    const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, c.data(), n, out.data(), nullptr, 1,
                                          nullptr, 1);
    if (info != 0) throw numeric_error(detail::diagnostics("zgeev", info, a));
  }
  return out;
}

/// Largest |i - j| over the nonzero entries.
inline int bandwidth(const Eigen::MatrixXcd& a) {
  int bw = 0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (a(i, j) != complex(0.0)) bw = std::max(bw, static_cast<int>(std::abs(i - j)));
  return bw;
}

/// Eigenvector for an eigenvalue estimate by shifted inverse iteration with a
/// banded LU factorization. The result has unit max-norm.
inline Eigen::VectorXcd inverse_iteration(const Eigen::MatrixXcd& a, complex eigenvalue, int bw, int sweeps = 3) {
  const auto n = static_cast<lapack_int>(a.rows());
  const lapack_int kl = bw, ku = bw, ldab = 2 * kl + ku + 1;
  double shift_eps = 1e-10 * std::max(1.0, std::abs(eigenvalue));
  for (int attempt = 0; attempt < 4; ++attempt, shift_eps *= 100.0) {
    const complex shift = eigenvalue + shift_eps;
    std::vector<complex> ab(static_cast<std::size_t>(ldab) * n, complex(0.0));
    for (lapack_int j = 0; j < n; ++j)
      for (lapack_int i = std::max<lapack_int>(0, j - ku); i <= std::min<lapack_int>(n - 1, j + kl); ++i)
        ab[static_cast<std::size_t>(kl + ku + i - j + j * ldab)] = a(i, j) - (i == j ? shift : complex(0.0));
    std::vector<lapack_int> ipiv(n);
    lapack_int info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n, n, kl, ku, ab.data(), ldab, ipiv.data());
    if (info < 0) throw numeric_error(detail::diagnostics("zgbtrf", info, a));
    if (info > 0) continue; // exactly singular, move the shift
    Eigen::VectorXcd v(n);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(0.5, 1.5);
    for (lapack_int i = 0; i < n; ++i) v[i] = dist(rng);
    for (int s = 0; s < sweeps; ++s) {
      info = LAPACKE_zgbtrs(LAPACK_COL_MAJOR, 'N', n, kl, ku, 1, ab.data(), ldab, ipiv.data(), v.data(), n);
      if (info != 0) throw numeric_error(detail::diagnostics("zgbtrs", info, a));
      const double m = v.cwiseAbs().maxCoeff();
      if (!(m > 0.0) || !std::isfinite(m)) break;
      v /= m;
    }
    if (v.allFinite()) return v;
  }
  throw numeric_error(detail::diagnostics("inverse iteration", 0, a));
}

/// Eigenvalue near `estimate` as the Rayleigh quotient of the inverse-iteration
/// eigenvector.
inline complex refine_eigenvalue(const Eigen::MatrixXcd& a, complex estimate, int bw, int sweeps = 4) {
  const Eigen::VectorXcd v = inverse_iteration(a, estimate, bw, sweeps);
  return v.dot(a * v) / v.squaredNorm();
}

/// ||second difference of v|| / (4 ||v||): about 1 for a grid-scale
/// alternating vector, small for smooth ones.
inline double roughness(const Eigen::VectorXcd& v) {
  const Eigen::Index n = v.size();
  double num = 0.0;
  for (Eigen::Index i = 1; i + 1 < n; ++i) num += std::norm(v[i + 1] - 2.0 * v[i] + v[i - 1]);
  const double den = v.squaredNorm();
  return den > 0.0 ? std::sqrt(num / den) / 4.0 : 0.0;
}

/// max |v| over the `width` outermost entries at each end, relative to max |v|.
inline double edge_amplitude(const Eigen::VectorXcd& v, int width = 2) {
  const Eigen::Index n = v.size();
  const double peak = v.cwiseAbs().maxCoeff();
  if (!(peak > 0.0)) return 0.0;
  double e = 0.0;
  for (Eigen::Index i = 0; i < std::min<Eigen::Index>(width, n); ++i)
    e = std::max({e, std::abs(v[i]), std::abs(v[n - 1 - i])});
  return e / peak;
}

} // namespace mlqm::linalg

#endif
