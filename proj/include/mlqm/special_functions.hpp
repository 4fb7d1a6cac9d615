#ifndef MLQM_SPECIAL_FUNCTIONS_HPP
#define MLQM_SPECIAL_FUNCTIONS_HPP

#include <cmath>
#include <vector>

#include "mlqm/errors.hpp"

namespace mlqm {

/// Degree and parameters of P_n^{(a,b)}. Classical range a, b > -1.
struct JacobiOrder {
  int n = 0;
  double a = 0.0;
  double b = 0.0;

  void validate() const {
    if (n < 0) throw domain_error("Jacobi degree must be non-negative");
    if (!(a > -1.0) || !(b > -1.0))
      throw domain_error("Jacobi parameters must satisfy a > -1 and b > -1");
  }
};

namespace detail {

// One step of the degree recurrence, producing P_k from P_{k-1}, P_{k-2}.
template <class T>
T jacobi_step(int k, double a, double b, const T& z, const T& pkm1, const T& pkm2) {
  const double kk = static_cast<double>(k);
  const double s = 2.0 * kk + a + b;
  const double c0 = 2.0 * kk * (kk + a + b) * (s - 2.0);
  const double c1 = (s - 1.0) * s * (s - 2.0);
  const double c2 = (s - 1.0) * (a * a - b * b);
  const double c3 = 2.0 * (kk + a - 1.0) * (kk + b - 1.0) * s;
  return ((c1 * z + c2) * pkm1 - c3 * pkm2) / c0;
}

} // namespace detail

/// P_n^{(a,b)}(z) by the three-term recurrence in the degree.
///
/// T may be double or a derivative-carrying scalar (mlqm::Jet).
template <class T>
T jacobi_eval(const JacobiOrder& order, const T& z) {
  order.validate();
  T p0 = T(1.0);
  if (order.n == 0) return p0;
  const double a = order.a, b = order.b;
  T p1 = (a + 1.0) + 0.5 * (a + b + 2.0) * (z - 1.0);
  for (int k = 2; k <= order.n; ++k) {
    T pk = detail::jacobi_step(k, a, b, z, p1, p0);
    p0 = p1;
    p1 = pk;
  }
  return p1;
}

/// [P_0, ..., P_{n_max}] at z in one sweep. Element k is bit-identical to
/// jacobi_eval({k, a, b}, z).
template <class T>
std::vector<T> jacobi_batch(double a, double b, int n_max, const T& z) {
  JacobiOrder{n_max, a, b}.validate();
  std::vector<T> out;
  out.reserve(static_cast<std::size_t>(n_max) + 1);
  out.push_back(T(1.0));
  if (n_max == 0) return out;
  out.push_back((a + 1.0) + 0.5 * (a + b + 2.0) * (z - 1.0));
  for (int k = 2; k <= n_max; ++k)
    out.push_back(detail::jacobi_step(k, a, b, z, out[k - 1], out[k - 2]));
  return out;
}

/// Generalized binomial C(x, n) = Gamma(x+1) / (Gamma(n+1) Gamma(x-n+1)), computed as a product.
inline double binomial(double x, int n) {
  double r = 1.0;
  for (int i = 1; i <= n; ++i) r *= (x - n + i) / static_cast<double>(i);
  return r;
}

} // namespace mlqm

#endif
