#include "distwave/protocols.hpp"

#include <algorithm>
#include <cmath>

#include "distwave/error.hpp"
#include "distwave/parallel.hpp"

namespace distwave {

namespace {

void check_candidates(std::span<const CoeffField> estimates, std::span<const double> sample_sizes) {
  if (estimates.empty()) fail(ErrorCode::InvalidArgument, "Lepski rule needs at least f~(0)");
  if (sample_sizes.size() < estimates.size()) {
    fail(ErrorCode::InvalidArgument, "Lepski rule needs n_l for every candidate level");
  }
  for (std::size_t l = 1; l < estimates.size(); ++l) {
    if (!(sample_sizes[l] > 0.0)) {
      fail(ErrorCode::InvalidArgument, "n_" + std::to_string(l) + " must be positive");
    }
  }
}

// distance[j][l] for j < l, in whichever norm the caller uses.
using DistanceTable = std::vector<std::vector<double>>;

DistanceTable l2_distances(std::span<const CoeffField> estimates) {
  const std::size_t count = estimates.size();
  DistanceTable table(count, std::vector<double>(count, 0.0));
  for (std::size_t j = 0; j < count; ++j) {
    for (std::size_t l = j + 1; l < count; ++l) {
      table[j][l] = squared_distance(estimates[j], estimates[l]);
    }
  }
  return table;
}

DistanceTable linfty_distances(std::span<const CoeffField> estimates, const WaveletBasis& basis) {
  const std::size_t count = estimates.size();
  const int j_max = static_cast<int>(count) - 1;
  int deepest = 0;
  for (const CoeffField& f : estimates) deepest = std::max(deepest, f.max_level());
  const std::size_t grid = std::size_t{1} << std::max(j_max + 3, deepest + 1);

  std::vector<std::vector<double>> values;
  values.reserve(count);
  for (const CoeffField& f : estimates) values.push_back(basis.synthesize(f, grid));

  DistanceTable table(count, std::vector<double>(count, 0.0));
  for (std::size_t j = 0; j < count; ++j) {
    for (std::size_t l = j + 1; l < count; ++l) {
      double sup = 0.0;
      for (std::size_t g = 0; g < grid; ++g) {
        sup = std::max(sup, std::abs(values[j][g] - values[l][g]));
      }
      table[j][l] = sup;
    }
  }
  return table;
}

double l2_unit(int l, double n_l) { return std::ldexp(1.0, l) / n_l; }

double linfty_unit(int l, double n_l) { return std::sqrt(l * std::ldexp(1.0, l) / n_l); }

template <class Unit>
int select(const DistanceTable& table, double tau, std::span<const double> sample_sizes,
           Unit unit) {
  const int count = static_cast<int>(table.size());
  for (int j = 0; j < count; ++j) {
    bool admissible = true;
    for (int l = j + 1; l < count && admissible; ++l) {
      admissible = table[j][l] <= tau * unit(l, sample_sizes[l]);
    }
    if (admissible) return j;
  }
  return count - 1;
}

}  // namespace

LocalOutput run_local(const RegressionSample& sample, const IndexRange& range,
                      const WaveletBasis& basis, const CodecParams& params) {
  LocalOutput out;
  if (range.empty()) return out;
  out.coefficients = empirical_coefficients(sample, basis, range.begin, range.end);
  for (double value : out.coefficients) {
    const BitMessage message = trans_approx_encode(value, params);
    out.stream.append(message.bits);
    out.bits.payload_bits += message.payload_bits;
    out.bits.framing_bits += message.framing_bits;
    out.bits.messages += 1;
    const double decoded = trans_approx_decode(message, params);
    out.max_quantization_error = std::max(out.max_quantization_error, std::abs(value - decoded));
  }
  return out;
}

CoeffField aggregate(const Schedule& schedule, const std::vector<std::vector<double>>& decoded) {
  if (decoded.size() != schedule.machines.size()) {
    fail(ErrorCode::MissingMessage, "expected messages from " +
                                        std::to_string(schedule.machines.size()) +
                                        " machines, got " + std::to_string(decoded.size()));
  }
  std::vector<double> sum(schedule.scheduled, 0.0);
  std::vector<int> count(schedule.scheduled, 0);
  for (std::size_t i = 0; i < decoded.size(); ++i) {
    const IndexRange& range = schedule.machines[i].range;
    if (decoded[i].size() != range.size()) {
      fail(ErrorCode::MissingMessage, "machine " + std::to_string(i) + " delivered " +
                                          std::to_string(decoded[i].size()) + " of " +
                                          std::to_string(range.size()) + " coefficients");
    }
    for (std::size_t r = 0; r < range.size(); ++r) {
      sum[range.begin + r] += decoded[i][r];
      count[range.begin + r] += 1;
    }
  }

  CoeffField field(schedule.max_level);
  auto values = field.values();
  for (std::size_t flat = 0; flat < schedule.scheduled; ++flat) {
    if (count[flat] == 0) {
      const LevelShift at = level_shift(flat);
      fail(ErrorCode::MissingMessage, "no message for coefficient (" + std::to_string(at.level) +
                                          ", " + std::to_string(at.shift) + ")");
    }
    values[flat] = sum[flat] / count[flat];
  }
  return field;
}

std::vector<CoeffField> truncation_estimates(const CoeffField& field, int j_max) {
  std::vector<CoeffField> out;
  out.reserve(static_cast<std::size_t>(j_max) + 1);
  for (int j = 0; j <= j_max; ++j) out.push_back(field.truncated_below(j));
  return out;
}

int lepski_select_l2(std::span<const CoeffField> estimates, double tau,
                     std::span<const double> sample_sizes) {
  check_candidates(estimates, sample_sizes);
  return select(l2_distances(estimates), tau, sample_sizes, l2_unit);
}

int lepski_select_linfty(std::span<const CoeffField> estimates, double tau,
                         std::span<const double> sample_sizes, const WaveletBasis& basis) {
  check_candidates(estimates, sample_sizes);
  return select(linfty_distances(estimates, basis), tau, sample_sizes, linfty_unit);
}

double lepski_zero_tau(std::span<const CoeffField> estimates, std::span<const double> sample_sizes,
                       Norm norm, const WaveletBasis& basis) {
  check_candidates(estimates, sample_sizes);
  const DistanceTable table =
      norm == Norm::L2 ? l2_distances(estimates) : linfty_distances(estimates, basis);
  double tau = 0.0;
  for (std::size_t l = 1; l < estimates.size(); ++l) {
    const int level = static_cast<int>(l);
    const double unit = norm == Norm::L2 ? l2_unit(level, sample_sizes[l])
                                         : linfty_unit(level, sample_sizes[l]);
    tau = std::max(tau, table[0][l] / unit);
  }
  return tau;
}

AggregatedEstimate decode_transcript(const Transcript& transcript, const Schedule& schedule,
                                     const WaveletBasis& basis) {
  const ProtocolConfig& cfg = transcript.config;
  const CodecParams params = cfg.codec();
  if (transcript.streams.size() != schedule.machines.size()) {
    fail(ErrorCode::Framing, "transcript holds " + std::to_string(transcript.streams.size()) +
                                 " streams for " + std::to_string(schedule.machines.size()) +
                                 " machines");
  }

  AggregatedEstimate out;
  out.ledger = BudgetLedger(schedule.machines.size());
  std::vector<std::vector<double>> decoded(schedule.machines.size());
  for (std::size_t i = 0; i < schedule.machines.size(); ++i) {
    const auto messages =
        decode_stream(transcript.streams[i], params, schedule.machines[i].range.size());
    decoded[i].reserve(messages.size());
    for (const DecodedMessage& message : messages) {
      decoded[i].push_back(message.value);
      out.ledger.record(i, message.payload_bits, message.framing_bits);
    }
    if (static_cast<double>(out.ledger.machine(i).payload_bits) > cfg.B) {
      out.overrun_machines.push_back(static_cast<int>(i));
    }
  }

  out.aggregate = aggregate(schedule, decoded);
  if (cfg.mode != Mode::Adaptive) {
    out.estimate = out.aggregate;
    return out;
  }

  const AdaptiveLayout& layout = *schedule.adaptive;
  out.sample_sizes = layout.sample_sizes;
  const std::vector<CoeffField> candidates = truncation_estimates(out.aggregate, layout.max_level);
  const int jhat = cfg.norm == Norm::L2
                       ? lepski_select_l2(candidates, cfg.tau, out.sample_sizes)
                       : lepski_select_linfty(candidates, cfg.tau, out.sample_sizes, basis);
  out.jhat = jhat;
  out.estimate = candidates[static_cast<std::size_t>(jhat)];
  return out;
}

AggregatedEstimate decode_transcript(const Transcript& transcript) {
  const Schedule schedule = build_schedule(transcript.config);
  const WaveletBasis basis =
      WaveletBasis::from_name(transcript.config.family, transcript.config.refinement_depth);
  return decode_transcript(transcript, schedule, basis);
}

ProtocolRun run_protocol(const ProtocolConfig& cfg, const std::vector<RegressionSample>& data,
                         const WaveletBasis& basis, Executor* executor) {
  ProtocolRun run;
  run.schedule = build_schedule(cfg);
  if (data.size() != static_cast<std::size_t>(cfg.m)) {
    fail(ErrorCode::ConfigInvalid, "data has " + std::to_string(data.size()) +
                                       " shards for m = " + std::to_string(cfg.m));
  }

  const CodecParams params = cfg.codec();
  std::vector<LocalOutput> local(data.size());
  parallel_for(executor, data.size(), [&](std::size_t i) {
    local[i] = run_local(data[i], run.schedule.machines[i].range, basis, params);
  });

  run.transcript.config = cfg;
  run.transcript.streams.reserve(local.size());
  for (LocalOutput& out : local) {
    run.max_quantization_error = std::max(run.max_quantization_error, out.max_quantization_error);
    run.transcript.streams.push_back(std::move(out.stream));
  }
  run.result = decode_transcript(run.transcript, run.schedule, basis);
  return run;
}

ProtocolRun run_protocol(const ProtocolConfig& cfg, const CoeffField& truth, double sigma,
                         Executor* executor) {
  cfg.validate();
  const WaveletBasis basis = WaveletBasis::from_name(cfg.family, cfg.refinement_depth);
  const auto data = generate_data(truth, basis, cfg.n, cfg.m, sigma, cfg.seed, executor);
  return run_protocol(cfg, data, basis, executor);
}

}  // namespace distwave
