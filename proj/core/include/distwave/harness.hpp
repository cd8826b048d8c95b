#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "distwave/bitcodec.hpp"
#include "distwave/coeff_field.hpp"
#include "distwave/error.hpp"
#include "distwave/protocol_config.hpp"
#include "distwave/signal_model.hpp"
#include "distwave/theory.hpp"
#include "distwave/wavelet_basis.hpp"

namespace distwave {

class Executor;

/// sum (f^_jk - f_jk)^2, zero-padding the shallower field.
double risk_l2(const CoeffField& estimate, const CoeffField& truth);

/// Squared error accumulated level by level; must agree with risk_l2.
std::vector<double> level_errors(const CoeffField& estimate, const CoeffField& truth);

/// max |f^ - f| on the midpoint grid; grid_size 0 picks 2^(J+3).
double risk_linf(const CoeffField& estimate, const CoeffField& truth, const WaveletBasis& basis,
                 std::size_t grid_size = 0);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double half_width = 0.0;  // 2 x standard error of the slope
  std::size_t points = 0;
};

/// Least squares of log2(risk) on log2(n). Needs >= 4 positive points
/// spanning >= 2 octaves, else DegenerateSpread.
SlopeFit fit_rate_slope(std::span<const std::pair<double, double>> points);

enum class SweepAxis { N, B, M, S };

SweepAxis parse_sweep_axis(const std::string& text);
std::string to_string(SweepAxis axis);

struct ExperimentConfig {
  ProtocolConfig protocol;
  SignalSpec signal;
  double sigma = 1.0;
  int replicates = 10;
  std::uint64_t master_seed = 1;
  /// When set, each cell uses B = ceil(budget_family(n)) instead of protocol.B.
  std::optional<SequenceFamily> budget_family;
  bool compute_linf = false;

  void validate() const;
};

struct ReplicateResult {
  double risk_l2 = 0.0;
  double risk_linf = 0.0;  // NaN unless computed
  std::optional<int> jhat;
  std::vector<MachineBits> machines;
  double max_quantization_error = 0.0;
};

struct CellResult {
  double axis_value = 0.0;
  ProtocolConfig config;  // the cell's effective config (seed = master seed)
  std::vector<ReplicateResult> replicates;
  std::optional<ErrorCode> error;
  std::string error_message;

  double mean_risk_l2 = 0.0;
  double se_risk_l2 = 0.0;
  double mean_risk_linf = 0.0;
  double se_risk_linf = 0.0;
  std::optional<double> mean_jhat;
  std::int64_t max_payload_bits = 0;   // any machine, any replicate
  double max_mean_payload_bits = 0.0;  // max over machines of the replicate mean
  std::int64_t max_wire_bits = 0;
  int overrun_replicates = 0;
  int discarded_machines = 0;
  double truth_sup_norm = 0.0;

  std::optional<RegimeReport> theory;
  std::optional<OptimalLevel> optimal;  // adaptive ladder level j*

  bool ok() const noexcept { return !error.has_value(); }
};

struct ExperimentReport {
  ExperimentConfig base;
  SweepAxis axis = SweepAxis::N;
  std::vector<CellResult> cells;
  std::optional<SlopeFit> slope_l2;
  std::optional<SlopeFit> slope_linf;
};

/// Seed of replicate r in cell c: split_seed(master, {c, r}).
std::uint64_t replicate_seed(std::uint64_t master, std::size_t cell, std::size_t replicate);

/// One cell: `replicates` protocol runs with fresh designs and noise.
/// Protocol errors are recorded in the cell, not thrown.
CellResult run_cell(const ExperimentConfig& cfg, std::size_t cell_index, double axis_value,
                    Executor* executor = nullptr);

/// Applies each value to the axis, runs every cell, and fits rate slopes
/// when sweeping n.
ExperimentReport run_sweep(const ExperimentConfig& base, SweepAxis axis,
                           std::span<const double> values, Executor* executor = nullptr);

/// Config for one cell with the axis value applied.
ExperimentConfig apply_axis(const ExperimentConfig& base, SweepAxis axis, double value);

struct TauCalibration {
  std::vector<double> zero_taus;  // per replicate: smallest tau giving jhat = 0
  double tau = 0.0;               // smallest tau with jhat = 0 in >= `target` of replicates
  double zero_rate = 0.0;         // realized fraction at `tau`
  double target = 0.95;
};

/// Runs the adaptive schedule on the zero signal (noise level cfg.sigma)
/// and reads off the empirical `target` quantile of the per-replicate
/// minimal tau. Replicate seeds follow replicate_seed(master, 0, r).
TauCalibration calibrate_tau(const ExperimentConfig& cfg, double target = 0.95,
                             Executor* executor = nullptr);

void write_report_json(std::ostream& out, const ExperimentReport& report);
void write_report_csv(std::ostream& out, const ExperimentReport& report);

}  // namespace distwave
