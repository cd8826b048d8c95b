#include "distwave/coeff_field.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "distwave/error.hpp"

namespace distwave {

namespace {

constexpr int kMaxStoredLevel = 30;

void check_index(int max_level, int level, std::int64_t shift) {
  if (level < 0 || level > max_level || shift < 0 || shift >= (std::int64_t{1} << level)) {
    fail(ErrorCode::InvalidArgument, "coefficient index (" + std::to_string(level) + ", " +
                                         std::to_string(shift) + ") outside field of max level " +
                                         std::to_string(max_level));
  }
}

}  // namespace

LevelShift level_shift(std::size_t flat) noexcept {
  const std::size_t number = flat + 1;
  const int level = static_cast<int>(std::bit_width(number)) - 1;
  return {level, static_cast<std::int64_t>(number - (std::size_t{1} << level))};
}

CoeffField::CoeffField(int max_level) : max_level_(max_level) {
  if (max_level < 0 || max_level > kMaxStoredLevel) {
    fail(ErrorCode::InvalidArgument, "max level " + std::to_string(max_level) + " out of range");
  }
  values_.assign((std::size_t{1} << (max_level + 1)) - 1, 0.0);
}

double& CoeffField::at(int level, std::int64_t shift) {
  check_index(max_level_, level, shift);
  return values_[flat_index(level, shift)];
}

double CoeffField::at(int level, std::int64_t shift) const {
  check_index(max_level_, level, shift);
  return values_[flat_index(level, shift)];
}

std::span<double> CoeffField::level(int j) {
  check_index(max_level_, j, 0);
  return std::span<double>(values_).subspan(flat_index(j, 0), std::size_t{1} << j);
}

std::span<const double> CoeffField::level(int j) const {
  check_index(max_level_, j, 0);
  return std::span<const double>(values_).subspan(flat_index(j, 0), std::size_t{1} << j);
}

double CoeffField::squared_norm() const noexcept {
  double total = 0.0;
  for (double v : values_) total += v * v;
  return total;
}

double CoeffField::level_squared_norm(int j) const {
  double total = 0.0;
  for (double v : level(j)) total += v * v;
  return total;
}

CoeffField CoeffField::resized(int max_level) const {
  CoeffField out(max_level);
  const std::size_t n = std::min(out.values_.size(), values_.size());
  std::copy_n(values_.begin(), n, out.values_.begin());
  return out;
}

CoeffField CoeffField::truncated_below(int first_dropped_level) const {
  CoeffField out = *this;
  if (first_dropped_level <= max_level_) {
    const std::size_t from = flat_index(std::max(first_dropped_level, 0), 0);
    std::fill(out.values_.begin() + static_cast<std::ptrdiff_t>(from), out.values_.end(), 0.0);
  }
  return out;
}

double squared_distance(const CoeffField& a, const CoeffField& b) noexcept {
  const auto va = a.values();
  const auto vb = b.values();
  const std::size_t common = std::min(va.size(), vb.size());
  double total = 0.0;
  for (std::size_t i = 0; i < common; ++i) {
    const double d = va[i] - vb[i];
    total += d * d;
  }
  for (std::size_t i = common; i < va.size(); ++i) total += va[i] * va[i];
  for (std::size_t i = common; i < vb.size(); ++i) total += vb[i] * vb[i];
  return total;
}

double besov_sobolev_norm(const CoeffField& field, double s) {
  if (!(s > 0.0)) fail(ErrorCode::InvalidArgument, "smoothness must be positive");
  double best = 0.0;
  for (int j = 0; j <= field.max_level(); ++j) {
    best = std::max(best, std::exp2(j * s) * std::sqrt(field.level_squared_norm(j)));
  }
  return best;
}

double besov_holder_norm(const CoeffField& field, double s) {
  if (!(s > 0.0)) fail(ErrorCode::InvalidArgument, "smoothness must be positive");
  double best = 0.0;
  for (int j = 0; j <= field.max_level(); ++j) {
    const double weight = std::exp2(j * (s + 0.5));
    for (double v : field.level(j)) best = std::max(best, weight * std::abs(v));
  }
  return best;
}

}  // namespace distwave
