#include "distwave/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>

#include "distwave/error.hpp"
#include "distwave/parallel.hpp"
#include "distwave/rng.hpp"

namespace distwave {

namespace {

constexpr int kMaxTruthLevel = 24;

}  // namespace

SignalKind parse_signal_kind(const std::string& text) {
  if (text == "worst_case" || text == "worst-case") return SignalKind::WorstCase;
  if (text == "random_sign" || text == "random-sign") return SignalKind::RandomSign;
  if (text == "zero") return SignalKind::Zero;
  if (text == "custom") return SignalKind::Custom;
  fail(ErrorCode::ConfigInvalid, "unknown signal kind '" + text + "'");
}

std::string to_string(SignalKind kind) {
  switch (kind) {
    case SignalKind::WorstCase: return "worst_case";
    case SignalKind::RandomSign: return "random_sign";
    case SignalKind::Zero: return "zero";
    case SignalKind::Custom: return "custom";
  }
  return "unknown";
}

CoeffField make_signal(const SignalSpec& spec) {
  if (!(spec.s > 0.0)) fail(ErrorCode::InvalidArgument, "signal smoothness s must be positive");
  if (!(spec.radius > 0.0)) fail(ErrorCode::InvalidArgument, "signal radius L must be positive");
  if (spec.truth_level < 0 || spec.truth_level > kMaxTruthLevel) {
    fail(ErrorCode::InvalidArgument, "J_truth must be in [0, 24]");
  }

  switch (spec.kind) {
    case SignalKind::Zero:
      return CoeffField(spec.truth_level);

    case SignalKind::WorstCase:
    case SignalKind::RandomSign: {
      CoeffField field(spec.truth_level);
      Engine engine = make_engine(split_seed(spec.seed, {0x5167ULL}));
      std::bernoulli_distribution coin(0.5);
      for (int j = 0; j <= spec.truth_level; ++j) {
        const double magnitude = spec.radius * std::exp2(-j * (spec.s + 0.5));
        for (double& v : field.level(j)) {
          const bool flip = spec.kind == SignalKind::RandomSign && coin(engine);
          v = flip ? -magnitude : magnitude;
        }
      }
      return field;
    }

    case SignalKind::Custom: {
      if (!spec.custom) fail(ErrorCode::InvalidArgument, "custom signal requires a field");
      const CoeffField& field = *spec.custom;
      const double norm = spec.ball == BallType::Sobolev ? besov_sobolev_norm(field, spec.s)
                                                         : besov_holder_norm(field, spec.s);
      if (norm > spec.radius * (1.0 + 1e-12)) {
        fail(ErrorCode::NormViolation, "custom signal has Besov norm " + std::to_string(norm) +
                                           " exceeding radius " + std::to_string(spec.radius));
      }
      return field;
    }
  }
  fail(ErrorCode::InvalidArgument, "unhandled signal kind");
}

std::vector<RegressionSample> generate_data(const CoeffField& truth, const WaveletBasis& basis,
                                            std::int64_t n, int m, double sigma,
                                            std::uint64_t seed, Executor* executor) {
  if (m < 1 || n < 1) fail(ErrorCode::ConfigInvalid, "n and m must be positive");
  if (n % m != 0) {
    fail(ErrorCode::ConfigInvalid, "m = " + std::to_string(m) + " does not divide n = " +
                                       std::to_string(n) + " (n/m must be an integer)");
  }
  if (!(sigma >= 0.0)) fail(ErrorCode::ConfigInvalid, "sigma must be non-negative");
  if (truth.max_level() > basis.max_level()) {
    fail(ErrorCode::LevelTooDeep, "truth level exceeds what the basis can evaluate");
  }

  const auto shard = static_cast<std::size_t>(n / m);
  std::vector<RegressionSample> samples(static_cast<std::size_t>(m));
  parallel_for(executor, samples.size(), [&](std::size_t i) {
    RegressionSample& sample = samples[i];
    sample.machine_id = static_cast<int>(i);
    sample.designs.resize(shard);
    sample.responses.resize(shard);
    Engine engine = make_engine(split_seed(seed, {static_cast<std::uint64_t>(i)}));
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t l = 0; l < shard; ++l) {
      const double t = uniform(engine);
      const double eps = normal(engine);
      sample.designs[l] = t;
      sample.responses[l] = basis.evaluate(truth, t) + sigma * eps;
    }
  });
  return samples;
}

double empirical_coefficient(const RegressionSample& sample, const WaveletBasis& basis, int level,
                             std::int64_t shift) {
  if (sample.size() == 0) fail(ErrorCode::InvalidArgument, "empty sample");
  double total = 0.0;
  for (std::size_t l = 0; l < sample.size(); ++l) {
    total += sample.responses[l] * basis.psi(level, shift, sample.designs[l]);
  }
  return total / static_cast<double>(sample.size());
}

std::vector<double> empirical_coefficients(const RegressionSample& sample,
                                           const WaveletBasis& basis, std::size_t begin,
                                           std::size_t end) {
  if (end < begin) fail(ErrorCode::InvalidArgument, "inverted coefficient range");
  std::vector<double> out(end - begin, 0.0);
  if (begin == end) return out;
  if (sample.size() == 0) fail(ErrorCode::InvalidArgument, "empty sample");

  const int first_level = level_shift(begin).level;
  const int last_level = level_shift(end - 1).level;
  for (std::size_t l = 0; l < sample.size(); ++l) {
    const double t = sample.designs[l];
    const double x = sample.responses[l];
    for (int j = first_level; j <= last_level; ++j) {
      const std::size_t level_start = flat_index(j, 0);
      basis.for_each_nonzero(j, t, [&](std::int64_t k, double value) {
        const std::size_t flat = level_start + static_cast<std::size_t>(k);
        if (flat >= begin && flat < end) out[flat - begin] += x * value;
      });
    }
  }
  const double inv = 1.0 / static_cast<double>(sample.size());
  for (double& v : out) v *= inv;
  return out;
}

void write_samples(std::ostream& out, std::span<const RegressionSample> samples) {
  out << "machine_id l T X\n";
  const auto old_precision = out.precision(17);
  for (const RegressionSample& sample : samples) {
    for (std::size_t l = 0; l < sample.size(); ++l) {
      out << sample.machine_id << ' ' << l << ' ' << sample.designs[l] << ' '
          << sample.responses[l] << '\n';
    }
  }
  out.precision(old_precision);
}

double sup_norm_on_grid(const WaveletBasis& basis, const CoeffField& field) {
  const std::vector<double> values =
      basis.synthesize(field, std::size_t{1} << (field.max_level() + 3));
  double best = 0.0;
  for (double v : values) best = std::max(best, std::abs(v));
  return best;
}

}  // namespace distwave
