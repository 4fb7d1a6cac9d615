#ifndef MLQM_DEFORMATION_HPP
#define MLQM_DEFORMATION_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mlqm/errors.hpp"

namespace mlqm {

using complex = std::complex<double>;

/// Parameters of the deformed algebra [x, p] = i hbar (1 + beta p^2).
///
/// `gamma` only changes the representation of x and the measure of the
/// scalar product; physical spectra do not depend on it. beta = 0 is the
/// undeformed limit and requires gamma = 0.
struct DeformationParams {
  double hbar = 1.0;
  double beta = 0.0;
  double gamma = 0.0;

  void validate() const {
    if (!(hbar > 0.0) || !std::isfinite(hbar))
      throw invalid_argument("hbar must be positive and finite");
    if (!(beta >= 0.0) || !std::isfinite(beta))
      throw invalid_argument("beta must be non-negative and finite");
    if (!std::isfinite(gamma))
      throw invalid_argument("gamma must be finite");
    if (beta == 0.0 && gamma != 0.0)
      throw invalid_argument("gamma must vanish when beta = 0 (gamma/beta undefined)");
  }

  /// gamma / beta, zero in the undeformed limit.
  double gamma_over_beta() const { return beta > 0.0 ? gamma / beta : 0.0; }

  /// Exponent e in the measure dp / (1 + beta p^2)^e.
  double weight_exponent() const { return 1.0 - gamma_over_beta(); }

  /// (1 + beta p^2)^(-(1 - gamma/beta)).
  double measure(double p) const {
    if (beta == 0.0) return 1.0;
    return std::pow(1.0 + beta * p * p, -weight_exponent());
  }

  double min_length() const { return hbar * std::sqrt(beta); }
};

/// Uniform momentum grid p_i = p_min + i * spacing, i = 0 .. n_points - 1.
class MomentumGrid {
public:
  MomentumGrid(double p_min, double p_max, std::size_t n_points)
      : p_min_(p_min), p_max_(p_max), n_(n_points) {
    if (!(p_min < p_max) || !std::isfinite(p_min) || !std::isfinite(p_max))
      throw invalid_grid("momentum grid requires finite p_min < p_max");
    if (n_points < 3) throw invalid_grid("momentum grid requires at least 3 points");
    spacing_ = (p_max - p_min) / static_cast<double>(n_points - 1);
  }

  static MomentumGrid symmetric(double p_max, std::size_t n_points) {
    return MomentumGrid(-p_max, p_max, n_points);
  }

  double p_min() const { return p_min_; }
  double p_max() const { return p_max_; }
  std::size_t size() const { return n_; }
  double spacing() const { return spacing_; }

  double operator[](std::size_t i) const {
    // Pin the last node to p_max exactly so symmetric grids are exactly symmetric.
    if (i + 1 == n_) return p_max_;
    return p_min_ + static_cast<double>(i) * spacing_;
  }

  bool is_symmetric() const { return p_min_ == -p_max_; }

  std::vector<double> points() const {
    std::vector<double> out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = (*this)[i];
    if (is_symmetric()) {
      for (std::size_t i = 0; i < n_ / 2; ++i) out[i] = -out[n_ - 1 - i];
      if (n_ % 2 == 1) out[n_ / 2] = 0.0;
    }
    return out;
  }

  friend bool operator==(const MomentumGrid& a, const MomentumGrid& b) {
    return a.p_min_ == b.p_min_ && a.p_max_ == b.p_max_ && a.n_ == b.n_;
  }

private:
  double p_min_;
  double p_max_;
  std::size_t n_;
  double spacing_;
};

/// Complex samples of a function of p on a MomentumGrid.
class GridFunction {
public:
  GridFunction(MomentumGrid grid, std::vector<complex> values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size())
      throw invalid_argument("grid function length does not match the grid");
    for (const auto& v : values_)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw invalid_argument("grid function contains non-finite samples");
  }

  template <class F>
  static GridFunction sample(const MomentumGrid& grid, F&& f) {
    const auto p = grid.points();
    std::vector<complex> v(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) v[i] = complex(f(p[i]));
    return GridFunction(grid, std::move(v));
  }

  const MomentumGrid& grid() const { return grid_; }
  std::span<const complex> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  const complex& operator[](std::size_t i) const { return values_[i]; }

private:
  MomentumGrid grid_;
  std::vector<complex> values_;
};

} // namespace mlqm

#endif
