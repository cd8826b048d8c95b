#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>

#include "distwave/protocol_config.hpp"

namespace distwave {

/// Which side of the fixed-point equation is active at the solution.
enum class DeltaBranch {
  SampleLimited,  // delta = m / (n log2 n)
  Saturated,      // every budget term is capped at 1, delta = m / (n m) = 1/n
  BudgetLimited,  // at least one uncapped budget term
};

std::string to_string(DeltaBranch branch);

struct DeltaSolution {
  double delta = 0.0;
  DeltaBranch branch = DeltaBranch::Saturated;
  double residual = 0.0;  // |delta - rhs(delta)| / delta
};

/// Right-hand side of the fixed-point equation
///   delta = min{ m / (n log2 n), m / (n sum_i [(log2 n delta^{1/(1+2s)} B_i) ^ 1]) }.
double delta_rhs(std::int64_t n, std::span<const double> budgets, double s, double delta);

/// Bisection on [2^-80, 1]; m is budgets.size().
DeltaSolution solve_delta_n(std::int64_t n, std::span<const double> budgets, double s);
DeltaSolution solve_delta_n(std::int64_t n, int m, double B, double s);

enum class Regime { HighBudget, Intermediate, SingleMachine };

std::string to_string(Regime regime);

struct RegimeReport {
  Regime regime = Regime::HighBudget;       // L2 classification
  Regime linf_regime = Regime::HighBudget;  // sup-norm classification
  double delta_n = 0.0;
  DeltaBranch branch = DeltaBranch::Saturated;
  double high_budget_threshold = 0.0;       // n^{1/(1+2s)} / log2 n
  double low_budget_threshold = 0.0;        // (n log2 n / m^{2+2s})^{1/(1+2s)}
  double linf_high_budget_threshold = 0.0;  // (n / (log2 n)^{3+4s})^{1/(1+2s)}
  double lb_rate_l2 = 0.0;    // squared-risk lower bound, constants set to 1
  double lb_rate_linf = 0.0;  // sup-norm risk lower bound, constants set to 1
  bool standing_assumption = false;  // log2 n <= m <= n^{2s/(1+2s)} / log2^2 n
};

/// B >= high threshold is HighBudget unless B is below the low threshold
/// (which, when m < log2 n, lies above the high one); B < low threshold
/// is SingleMachine; everything else is Intermediate.
RegimeReport classify_regime(std::int64_t n, int m, double B, double s, double L = 1.0);

struct OptimalLevel {
  int level = 0;
  double sample_size = 0.0;  // n_{j*}
};

/// Smallest j in {0..j_max} where the squared bias 2^{-2js} L^2 (L2) or the
/// bias 2^{-js} L (sup norm) falls to the stochastic term 2^j / n_j resp.
/// sqrt(j 2^j / n_j), using the n_j ladder of the adaptive schedule for
/// (n, m, B, s_min). Returns j_max when no level qualifies.
OptimalLevel optimal_level(std::int64_t n, int m, double B, double s, double L, Norm norm,
                           double s_min);

/// c * n^power * (log2 n)^log_power; describes how m or B grows with n.
struct SequenceFamily {
  double coefficient = 1.0;
  double power = 0.0;
  double log_power = 0.0;

  double at(double n) const;
  /// Parses products of terms such as "n^0.5", "sqrt(n)", "log2n", "logn",
  /// "log2n^2", "3", "2*n^0.25". Throws ConfigInvalid.
  static SequenceFamily parse(const std::string& text);
  std::string to_string() const;
};

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

/// inf { s > 0 : (n log2^2 n / m^{2+2s})^{1/(1+2s)} <= B } at this finite n,
/// bisected over (1e-6, 50]. Returns 0 when the smallest s already
/// qualifies and +inf when s = 50 does not.
double s_min_feasible(double n, double m, double B);

/// The same infimum for the liminf over n -> infinity when m and B follow
/// the given families; exact, computed from the leading-order exponents.
double s_min_asymptotic(const SequenceFamily& m, const SequenceFamily& B);

}  // namespace distwave
