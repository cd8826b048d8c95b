#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace distwave {

/// Flat position of (j, k) in the level-major ordering: 2^j + k - 1.
/// The 1-based value 2^j + k is the "coefficient number" used by the
/// grouped schedules.
constexpr std::size_t flat_index(int level, std::int64_t shift) noexcept {
  return (std::size_t{1} << level) - 1 + static_cast<std::size_t>(shift);
}

struct LevelShift {
  int level = 0;
  std::int64_t shift = 0;

  friend bool operator==(const LevelShift&, const LevelShift&) = default;
};

LevelShift level_shift(std::size_t flat) noexcept;

/// Triangular array {f_jk : 0 <= j <= J, 0 <= k < 2^j} of detail
/// coefficients. Stores exactly 2^(J+1) - 1 values.
class CoeffField {
public:
  CoeffField() : CoeffField(0) {}
  explicit CoeffField(int max_level);

  int max_level() const noexcept { return max_level_; }
  std::size_t size() const noexcept { return values_.size(); }

  double& at(int level, std::int64_t shift);
  double at(int level, std::int64_t shift) const;

  std::span<double> level(int j);
  std::span<const double> level(int j) const;

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  /// Sum of squares; the squared L2 norm of the represented function.
  double squared_norm() const noexcept;
  double level_squared_norm(int j) const;

  /// Copy truncated or zero-padded to `max_level`.
  CoeffField resized(int max_level) const;

  /// Copy with every level >= `first_dropped_level` zeroed.
  CoeffField truncated_below(int first_dropped_level) const;

  friend bool operator==(const CoeffField&, const CoeffField&) = default;

private:
  int max_level_;
  std::vector<double> values_;
};

/// Sum of squared differences, zero-padding the shorter field.
double squared_distance(const CoeffField& a, const CoeffField& b) noexcept;

/// Holder-type and Sobolev-type Besov norms in the coefficient domain.
double besov_sobolev_norm(const CoeffField& field, double s);
double besov_holder_norm(const CoeffField& field, double s);

}  // namespace distwave
