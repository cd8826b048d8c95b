#include "distwave/theory.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "distwave/error.hpp"
#include "distwave/schedule.hpp"

namespace distwave {

namespace {

double log2n(std::int64_t n) { return std::log2(static_cast<double>(n)); }

void check_theory_args(std::int64_t n, std::size_t m, double s) {
  if (n < 4) fail(ErrorCode::InvalidArgument, "theory needs n >= 4");
  if (m < 1) fail(ErrorCode::InvalidArgument, "theory needs m >= 1");
  if (!(s > 0.0)) fail(ErrorCode::InvalidArgument, "theory needs s > 0");
}

double budget_sum(std::int64_t n, std::span<const double> budgets, double s, double delta,
                  bool* saturated) {
  const double scale = log2n(n) * std::pow(delta, 1.0 / (1.0 + 2.0 * s));
  double sum = 0.0;
  bool all = true;
  for (double b : budgets) {
    const double term = scale * b;
    if (term < 1.0) all = false;
    sum += std::min(term, 1.0);
  }
  if (saturated != nullptr) *saturated = all;
  return sum;
}

bool parse_number(const std::string& text, double& value) {
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last;
}

// Feasibility of the leading-order comparison: the sign of
// (a0 + a1 s) log2 n + (b0 + b1 s) log2 log2 n + (c0 + c1 s), read
// lexicographically.
struct Linear {
  double constant = 0.0;
  double slope = 0.0;
  double at(double s) const { return constant + slope * s; }
};

constexpr double kTie = 1e-12;

bool leading_order_holds(const std::array<Linear, 3>& terms, double s) {
  for (const Linear& term : terms) {
    const double value = term.at(s);
    if (value > kTie) return true;
    if (value < -kTie) return false;
  }
  return true;
}

}  // namespace

std::string to_string(DeltaBranch branch) {
  switch (branch) {
    case DeltaBranch::SampleLimited: return "sample_limited";
    case DeltaBranch::Saturated: return "saturated";
    case DeltaBranch::BudgetLimited: return "budget_limited";
  }
  return "unknown";
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::HighBudget: return "high_budget";
    case Regime::Intermediate: return "intermediate";
    case Regime::SingleMachine: return "single_machine";
  }
  return "unknown";
}

double delta_rhs(std::int64_t n, std::span<const double> budgets, double s, double delta) {
  const double m = static_cast<double>(budgets.size());
  const double first = m / (static_cast<double>(n) * log2n(n));
  const double second = m / (static_cast<double>(n) * budget_sum(n, budgets, s, delta, nullptr));
  return std::min(first, second);
}

DeltaSolution solve_delta_n(std::int64_t n, std::span<const double> budgets, double s) {
  check_theory_args(n, budgets.size(), s);
  for (double b : budgets) {
    if (!(b > 0.0)) fail(ErrorCode::InvalidArgument, "budgets must be positive");
  }
  // delta - rhs(delta) is increasing; shrink until the bracket stops moving.
  double lo = std::ldexp(1.0, -80);
  double hi = 1.0;
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (mid - delta_rhs(n, budgets, s, mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double lo_gap = std::abs(lo - delta_rhs(n, budgets, s, lo));
  const double hi_gap = std::abs(hi - delta_rhs(n, budgets, s, hi));

  DeltaSolution out;
  out.delta = lo_gap < hi_gap ? lo : hi;
  out.residual = std::min(lo_gap, hi_gap) / out.delta;

  const double m = static_cast<double>(budgets.size());
  const double first = m / (static_cast<double>(n) * log2n(n));
  bool saturated = false;
  const double second = m / (static_cast<double>(n) * budget_sum(n, budgets, s, out.delta, &saturated));
  if (first <= second) {
    out.branch = DeltaBranch::SampleLimited;
  } else {
    out.branch = saturated ? DeltaBranch::Saturated : DeltaBranch::BudgetLimited;
  }
  return out;
}

DeltaSolution solve_delta_n(std::int64_t n, int m, double B, double s) {
  if (m < 1) fail(ErrorCode::InvalidArgument, "theory needs m >= 1");
  const std::vector<double> budgets(static_cast<std::size_t>(m), B);
  return solve_delta_n(n, budgets, s);
}

RegimeReport classify_regime(std::int64_t n, int m, double B, double s, double L) {
  check_theory_args(n, static_cast<std::size_t>(std::max(m, 0)), s);
  if (!(B > 0.0)) fail(ErrorCode::InvalidArgument, "theory needs B > 0");

  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  const double ln = log2n(n);
  const double inv = 1.0 / (1.0 + 2.0 * s);

  RegimeReport report;
  report.high_budget_threshold = std::pow(nd, inv) / ln;
  report.low_budget_threshold = std::pow(nd * ln / std::pow(md, 2.0 + 2.0 * s), inv);
  report.linf_high_budget_threshold = std::pow(nd / std::pow(ln, 3.0 + 4.0 * s), inv);

  auto label = [&](double high) {
    if (B < report.low_budget_threshold) return Regime::SingleMachine;
    if (B >= high) return Regime::HighBudget;
    return Regime::Intermediate;
  };
  report.regime = label(report.high_budget_threshold);
  report.linf_regime = label(report.linf_high_budget_threshold);

  const DeltaSolution delta = solve_delta_n(n, m, B, s);
  report.delta_n = delta.delta;
  report.branch = delta.branch;

  const double l2_rate = std::pow(L, 2.0 * inv) * std::pow(nd, -2.0 * s * inv);
  switch (report.regime) {
    case Regime::HighBudget: report.lb_rate_l2 = l2_rate; break;
    case Regime::Intermediate:
      report.lb_rate_l2 =
          l2_rate * std::pow(std::pow(nd, inv) / (B * ln), 2.0 * s / (2.0 + 2.0 * s));
      break;
    case Regime::SingleMachine: report.lb_rate_l2 = std::pow(nd * ln / md, -2.0 * s * inv); break;
  }

  const double linf_rate = std::pow(nd / ln, -s * inv);
  switch (report.linf_regime) {
    case Regime::HighBudget: report.lb_rate_linf = linf_rate; break;
    case Regime::Intermediate:
      report.lb_rate_linf =
          std::pow(std::pow(nd, inv) / (B * std::pow(ln, (3.0 + 4.0 * s) * inv)),
                   s / (2.0 + 2.0 * s)) *
          linf_rate;
      break;
    case Regime::SingleMachine: report.lb_rate_linf = std::pow(nd * ln / md, -s * inv); break;
  }

  report.standing_assumption = ln <= md && md <= std::pow(nd, 2.0 * s * inv) / (ln * ln);
  return report;
}

OptimalLevel optimal_level(std::int64_t n, int m, double B, double s, double L, Norm norm,
                           double s_min) {
  const AdaptiveLayout layout = adaptive_layout(n, m, B, s_min);
  if (layout.sample_sizes.empty()) fail(ErrorCode::InfeasibleSchedule, layout.infeasibility);

  for (int j = 0; j <= layout.max_level; ++j) {
    const double n_j = layout.sample_sizes[static_cast<std::size_t>(j)];
    const double stochastic = norm == Norm::L2 ? std::ldexp(1.0, j) / n_j
                                               : std::sqrt(j * std::ldexp(1.0, j) / n_j);
    const double bias = norm == Norm::L2 ? std::exp2(-2.0 * j * s) * L * L : std::exp2(-j * s) * L;
    if (bias <= stochastic) return OptimalLevel{j, n_j};
  }
  return OptimalLevel{layout.max_level, layout.sample_sizes.back()};
}

double SequenceFamily::at(double n) const {
  return coefficient * std::pow(n, power) * std::pow(std::log2(n), log_power);
}

SequenceFamily SequenceFamily::parse(const std::string& text) {
  std::string compact;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) compact.push_back(c);
  }
  if (compact.empty()) fail(ErrorCode::ConfigInvalid, "empty sequence expression");

  SequenceFamily out;
  std::size_t start = 0;
  while (start <= compact.size()) {
    const std::size_t stop = std::min(compact.find('*', start), compact.size());
    std::string term = compact.substr(start, stop - start);
    start = stop + 1;

    double exponent = 1.0;
    double number = 0.0;
    if (parse_number(term, number)) {
      out.coefficient *= number;
      continue;
    }
    const auto caret = term.rfind('^');
    if (caret != std::string::npos) {
      if (!parse_number(term.substr(caret + 1), exponent)) {
        fail(ErrorCode::ConfigInvalid, "bad exponent in '" + text + "'");
      }
      term.resize(caret);
    }
    if (term == "n") {
      out.power += exponent;
    } else if (term == "sqrt(n)") {
      out.power += 0.5 * exponent;
    } else if (term == "log2n" || term == "log2(n)") {
      out.log_power += exponent;
    } else if (term == "logn" || term == "log(n)" || term == "lnn" || term == "ln(n)") {
      out.log_power += exponent;
      out.coefficient *= std::pow(std::numbers::ln2, exponent);
    } else {
      fail(ErrorCode::ConfigInvalid, "unknown term '" + term + "' in '" + text + "'");
    }
  }
  return out;
}

std::string SequenceFamily::to_string() const {
  std::ostringstream out;
  out << format_double(coefficient);
  if (power != 0.0) out << "*n^" << format_double(power);
  if (log_power != 0.0) out << "*log2n^" << format_double(log_power);
  return out.str();
}

double s_min_feasible(double n, double m, double B) {
  if (!(n >= 4.0) || !(m >= 1.0) || !(B > 0.0)) {
    fail(ErrorCode::InvalidArgument, "s_min needs n >= 4, m >= 1, B > 0");
  }
  const double a = std::log2(n) + 2.0 * std::log2(std::log2(n));
  const double c = std::log2(m);
  const double target = std::log2(B);
  auto holds = [&](double s) { return (a - (2.0 + 2.0 * s) * c) / (1.0 + 2.0 * s) <= target; };

  constexpr double kLow = 1e-6;
  constexpr double kHigh = 50.0;
  if (holds(kLow)) return 0.0;
  if (!holds(kHigh)) return kUnbounded;
  double lo = kLow;
  double hi = kHigh;
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (holds(mid) ? hi : lo) = mid;
  }
  return hi;
}

double s_min_asymptotic(const SequenceFamily& m, const SequenceFamily& B) {
  if (!(m.coefficient > 0.0) || !(B.coefficient > 0.0)) {
    fail(ErrorCode::InvalidArgument, "sequence coefficients must be positive");
  }
  // (1+2s) log2 B + (2+2s) log2 m - log2 n - 2 log2 log2 n >= 0, grouped
  // by order of growth.
  const std::array<Linear, 3> terms{
      Linear{B.power + 2.0 * m.power - 1.0, 2.0 * B.power + 2.0 * m.power},
      Linear{B.log_power + 2.0 * m.log_power - 2.0, 2.0 * B.log_power + 2.0 * m.log_power},
      Linear{std::log2(B.coefficient) + 2.0 * std::log2(m.coefficient),
             2.0 * std::log2(B.coefficient) + 2.0 * std::log2(m.coefficient)},
  };

  std::vector<double> breaks{0.0};
  for (const Linear& term : terms) {
    if (term.slope != 0.0) {
      const double root = -term.constant / term.slope;
      if (root > 0.0) breaks.push_back(root);
    }
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  // Feasibility is constant between consecutive breakpoints.
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    if (i > 0 && leading_order_holds(terms, breaks[i])) return breaks[i];
    const double next = i + 1 < breaks.size() ? breaks[i + 1] : breaks[i] + 2.0;
    if (leading_order_holds(terms, 0.5 * (breaks[i] + next))) return breaks[i];
  }
  return kUnbounded;
}

}  // namespace distwave
