#ifndef MLQM_JET_HPP
#define MLQM_JET_HPP

#include <cmath>

namespace mlqm {

/// Second-order Taylor jet: value, first and second derivative with respect
/// to one independent variable. Propagates exact derivatives through the
/// chain rule, so templated evaluators yield psi, psi' and psi'' in one pass.
struct Jet {
  double v = 0.0;
  double d = 0.0;
  double dd = 0.0;

  constexpr Jet() = default;
  constexpr Jet(double value) : v(value) {}
  constexpr Jet(double value, double first, double second) : v(value), d(first), dd(second) {}

  static constexpr Jet variable(double x) { return {x, 1.0, 0.0}; }

  Jet& operator+=(const Jet& o) { v += o.v; d += o.d; dd += o.dd; return *this; }
  Jet& operator-=(const Jet& o) { v -= o.v; d -= o.d; dd -= o.dd; return *this; }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this / o; }

  friend Jet operator-(const Jet& a) { return {-a.v, -a.d, -a.dd}; }
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b) {
    return {a.v * b.v, a.d * b.v + a.v * b.d, a.dd * b.v + 2.0 * a.d * b.d + a.v * b.dd};
  }
  friend Jet operator/(const Jet& a, const Jet& b) {
    const double r = 1.0 / b.v;
    // (1/b)' = -b'/b^2, (1/b)'' = 2 b'^2 / b^3 - b''/b^2
    const Jet inv{r, -b.d * r * r, 2.0 * b.d * b.d * r * r * r - b.dd * r * r};
    return a * inv;
  }
};

namespace detail {
/// Compose an outer function with value f0 and derivatives f1, f2 at x.v.
inline Jet chain(const Jet& x, double f0, double f1, double f2) {
  return {f0, f1 * x.d, f2 * x.d * x.d + f1 * x.dd};
}
} // namespace detail

inline Jet sqrt(const Jet& x) {
  const double s = std::sqrt(x.v);
  return detail::chain(x, s, 0.5 / s, -0.25 / (s * x.v));
}
inline Jet exp(const Jet& x) {
  const double e = std::exp(x.v);
  return detail::chain(x, e, e, e);
}
inline Jet log(const Jet& x) { return detail::chain(x, std::log(x.v), 1.0 / x.v, -1.0 / (x.v * x.v)); }
inline Jet pow(const Jet& x, double a) {
  const double p = std::pow(x.v, a);
  return detail::chain(x, p, a * p / x.v, a * (a - 1.0) * p / (x.v * x.v));
}
inline Jet sin(const Jet& x) {
  const double s = std::sin(x.v), c = std::cos(x.v);
  return detail::chain(x, s, c, -s);
}
inline Jet cos(const Jet& x) {
  const double s = std::sin(x.v), c = std::cos(x.v);
  return detail::chain(x, c, -s, -c);
}
inline Jet atan(const Jet& x) {
  const double r = 1.0 / (1.0 + x.v * x.v);
  return detail::chain(x, std::atan(x.v), r, -2.0 * x.v * r * r);
}

inline double value_of(double x) { return x; }
inline double value_of(const Jet& x) { return x.v; }

} // namespace mlqm

#endif
