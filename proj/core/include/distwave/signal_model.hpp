#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "distwave/coeff_field.hpp"
#include "distwave/wavelet_basis.hpp"

namespace distwave {

class Executor;

enum class SignalKind { WorstCase, RandomSign, Zero, Custom };

/// Which Besov ball the signal must lie in: B^s_{2,inf}(L) for L2
/// experiments, B^s_{inf,inf}(L) for sup-norm experiments.
enum class BallType { Sobolev, Holder };

SignalKind parse_signal_kind(const std::string& text);
std::string to_string(SignalKind kind);

struct SignalSpec {
  SignalKind kind = SignalKind::WorstCase;
  double s = 1.0;
  double radius = 1.0;  // L
  int truth_level = 16;  // J_truth
  std::uint64_t seed = 0;
  BallType ball = BallType::Sobolev;
  std::optional<CoeffField> custom;  // used when kind == Custom
};

/// Ground-truth coefficients. WorstCase is f_jk = L 2^{-j(s+1/2)}, which
/// has both Besov norms equal to L; RandomSign flips each sign
/// independently.
CoeffField make_signal(const SignalSpec& spec);

/// One local machine's shard of the regression data
/// X = f0(T) + sigma * eps, T ~ U(0,1), eps ~ N(0,1).
struct RegressionSample {
  int machine_id = 0;  // 0-based
  std::vector<double> designs;
  std::vector<double> responses;

  std::size_t size() const noexcept { return designs.size(); }
};

/// Generates m shards of n/m observations each. Machine i draws from the
/// stream split_seed(seed, {i}), so output is identical whether or not an
/// executor is supplied.
std::vector<RegressionSample> generate_data(const CoeffField& truth, const WaveletBasis& basis,
                                            std::int64_t n, int m, double sigma,
                                            std::uint64_t seed, Executor* executor = nullptr);

/// (m/n) sum_l X_l psi_jk(T_l), i.e. the sample mean of X psi_jk(T).
double empirical_coefficient(const RegressionSample& sample, const WaveletBasis& basis, int level,
                             std::int64_t shift);

/// Empirical coefficients for the flat index range [begin, end). Visits
/// only the shifts whose support contains each design point.
std::vector<double> empirical_coefficients(const RegressionSample& sample,
                                           const WaveletBasis& basis, std::size_t begin,
                                           std::size_t end);

/// Columnar text dump: header line, then "machine_id l T X" per
/// observation with 17 significant digits.
void write_samples(std::ostream& out, std::span<const RegressionSample> samples);

/// sup |f| over the midpoint grid of size 2^(J+3).
double sup_norm_on_grid(const WaveletBasis& basis, const CoeffField& field);

}  // namespace distwave
