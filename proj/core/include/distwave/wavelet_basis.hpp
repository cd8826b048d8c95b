#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "distwave/coeff_field.hpp"
#include "distwave/error.hpp"

namespace distwave {

enum class Family { Haar, Daubechies };

/// Orthonormal periodized wavelet system {psi_jk : j >= 0, 0 <= k < 2^j} on
/// [0, 1]. psi_jk(t) = 2^(j/2) psi(2^j t - k), wrapped modulo 1.
///
/// Haar is evaluated exactly. Daubechies mothers with N vanishing moments
/// are tabulated once on the dyadic grid 2^-R by the cascade recursion and
/// linearly interpolated between grid points. Copies share the table.
class WaveletBasis {
public:
  static constexpr int kDefaultRefinementDepth = 12;

  static WaveletBasis haar();
  static WaveletBasis daubechies(int vanishing_moments,
                                 int refinement_depth = kDefaultRefinementDepth);

  /// Accepts "haar" or "daubechiesN" (e.g. "daubechies4").
  static WaveletBasis from_name(const std::string& name,
                                int refinement_depth = kDefaultRefinementDepth);

  Family family() const noexcept { return family_; }
  int vanishing_moments() const noexcept { return vanishing_moments_; }
  int refinement_depth() const noexcept { return refinement_depth_; }
  std::string name() const;

  /// Smoothness limit s_max: Besov characterisations hold for s < N.
  double regularity() const noexcept { return static_cast<double>(vanishing_moments_); }

  /// Length of the mother wavelet's support, 2N - 1.
  int support_width() const noexcept { return 2 * vanishing_moments_ - 1; }

  /// Deepest level this basis can evaluate reliably.
  int max_level() const noexcept { return max_level_; }

  /// Unperiodized mother wavelet, supported on [0, 2N - 1].
  double mother(double x) const noexcept;

  /// psi_jk(t) with periodized boundary handling.
  double psi(int level, std::int64_t shift, double t) const;

  /// Calls fn(k, psi_jk(t)) for every shift k whose wavelet may be nonzero
  /// at t. Each k is visited at most once.
  template <class Fn>
  void for_each_nonzero(int level, double t, Fn&& fn) const;

  /// Pointwise value of sum f_jk psi_jk.
  double evaluate(const CoeffField& field, double t) const;

  /// Values of the expansion on the midpoint grid (i + 1/2) / grid_size.
  std::vector<double> synthesize(const CoeffField& field, std::size_t grid_size) const;

private:
  WaveletBasis(Family family, int vanishing_moments, int refinement_depth,
               std::shared_ptr<const std::vector<double>> table);

  void check_level(int level) const;
  double periodized(double x, double period) const noexcept;

  Family family_;
  int vanishing_moments_;
  int refinement_depth_;
  int max_level_;
  double table_scale_;  // 2^R
  std::shared_ptr<const std::vector<double>> table_;
};

template <class Fn>
void WaveletBasis::for_each_nonzero(int level, double t, Fn&& fn) const {
  check_level(level);
  const std::int64_t period = std::int64_t{1} << level;
  const double scale = std::exp2(0.5 * level);
  const double u = std::ldexp(t, level);

  if (family_ == Family::Haar) {
    const auto k = static_cast<std::int64_t>(std::floor(u));
    if (k < 0 || k >= period) return;
    fn(k, (u - static_cast<double>(k) < 0.5) ? scale : -scale);
    return;
  }

  const int width = support_width();
  if (period < width) {
    for (std::int64_t k = 0; k < period; ++k) {
      fn(k, scale * periodized(u - static_cast<double>(k), static_cast<double>(period)));
    }
    return;
  }
  const auto base = static_cast<std::int64_t>(std::floor(u));
  for (int a = 0; a < width; ++a) {
    const std::int64_t k = base - a;
    const double value = mother(u - static_cast<double>(k));
    fn(((k % period) + period) % period, scale * value);
  }
}

}  // namespace distwave
