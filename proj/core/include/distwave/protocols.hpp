#pragma once

#include <optional>
#include <span>
#include <vector>

#include "distwave/bitcodec.hpp"
#include "distwave/coeff_field.hpp"
#include "distwave/protocol_config.hpp"
#include "distwave/schedule.hpp"
#include "distwave/signal_model.hpp"
#include "distwave/wavelet_basis.hpp"

namespace distwave {

class Executor;

/// What one local machine sends: its scheduled coefficients, encoded and
/// concatenated in index order.
struct LocalOutput {
  BitString stream;
  MachineBits bits;
  std::vector<double> coefficients;   // unquantized local estimates
  double max_quantization_error = 0.0;
};

LocalOutput run_local(const RegressionSample& sample, const IndexRange& range,
                      const WaveletBasis& basis, const CodecParams& params);

/// Everything the central machine receives, plus the config that fixes
/// the schedule and the codec on both sides.
struct Transcript {
  ProtocolConfig config;
  std::vector<BitString> streams;  // one per machine, possibly empty

  friend bool operator==(const Transcript&, const Transcript&) = default;
};

struct AggregatedEstimate {
  CoeffField aggregate;  // mean of decoded messages; unscheduled entries 0
  CoeffField estimate;   // the returned estimator
  std::optional<int> jhat;
  std::vector<double> sample_sizes;  // n_j used by the Lepski rule
  BudgetLedger ledger;
  std::vector<int> overrun_machines;  // paper-accounting payload above B
};

/// Mean over the owners of each scheduled coefficient. `decoded[i]` holds
/// machine i's values in the order of its range. Throws MissingMessage if
/// a machine delivered the wrong number of values.
CoeffField aggregate(const Schedule& schedule, const std::vector<std::vector<double>>& decoded);

/// f~(j) = sum of the levels below j, for j = 0..j_max.
std::vector<CoeffField> truncation_estimates(const CoeffField& field, int j_max);

/// min { j : d(f~(j), f~(l)) <= tau * r(l) for all l > j } where
/// r(l) = 2^l / n_l and d is the squared L2 distance.
int lepski_select_l2(std::span<const CoeffField> estimates, double tau,
                     std::span<const double> sample_sizes);

/// Same rule with the sup-norm distance on a midpoint grid of size
/// 2^(j_max + 3) and r(l) = sqrt(l 2^l / n_l).
int lepski_select_linfty(std::span<const CoeffField> estimates, double tau,
                         std::span<const double> sample_sizes, const WaveletBasis& basis);

/// Smallest tau for which the rule returns 0 on these estimates.
double lepski_zero_tau(std::span<const CoeffField> estimates, std::span<const double> sample_sizes,
                       Norm norm, const WaveletBasis& basis);

/// Central-machine side: decode every stream against the schedule,
/// average, and (adaptive mode) run the Lepski selection. Uses nothing but
/// the transcript.
AggregatedEstimate decode_transcript(const Transcript& transcript, const Schedule& schedule,
                                     const WaveletBasis& basis);
AggregatedEstimate decode_transcript(const Transcript& transcript);

struct ProtocolRun {
  Schedule schedule;
  Transcript transcript;
  AggregatedEstimate result;
  double max_quantization_error = 0.0;
};

/// Full pipeline on given data.
ProtocolRun run_protocol(const ProtocolConfig& cfg, const std::vector<RegressionSample>& data,
                         const WaveletBasis& basis, Executor* executor = nullptr);

/// Draws data from `truth` with cfg.seed, then runs the pipeline.
ProtocolRun run_protocol(const ProtocolConfig& cfg, const CoeffField& truth, double sigma,
                         Executor* executor = nullptr);

}  // namespace distwave
