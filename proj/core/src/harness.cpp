#include "distwave/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "json.hpp"

#include "distwave/parallel.hpp"
#include "distwave/protocols.hpp"
#include "distwave/rng.hpp"

namespace distwave {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::pair<double, double> mean_and_se(const std::vector<double>& values) {
  if (values.empty()) return {kNaN, kNaN};
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double var = ss / static_cast<double>(values.size() - 1);
  return {mean, std::sqrt(var / static_cast<double>(values.size()))};
}

void summarize(CellResult& cell) {
  std::vector<double> l2, linf, jhat;
  std::vector<double> machine_payload;
  for (const ReplicateResult& rep : cell.replicates) {
    l2.push_back(rep.risk_l2);
    linf.push_back(rep.risk_linf);
    if (rep.jhat) jhat.push_back(*rep.jhat);
    if (machine_payload.size() < rep.machines.size()) machine_payload.resize(rep.machines.size());
    bool overrun = false;
    for (std::size_t i = 0; i < rep.machines.size(); ++i) {
      const MachineBits& bits = rep.machines[i];
      machine_payload[i] += static_cast<double>(bits.payload_bits);
      cell.max_payload_bits = std::max(cell.max_payload_bits, bits.payload_bits);
      cell.max_wire_bits = std::max(cell.max_wire_bits, bits.wire_bits());
      if (static_cast<double>(bits.payload_bits) > cell.config.B) overrun = true;
    }
    if (overrun) ++cell.overrun_replicates;
  }
  std::tie(cell.mean_risk_l2, cell.se_risk_l2) = mean_and_se(l2);
  std::tie(cell.mean_risk_linf, cell.se_risk_linf) = mean_and_se(linf);
  if (!jhat.empty()) cell.mean_jhat = mean_and_se(jhat).first;
  for (double total : machine_payload) {
    cell.max_mean_payload_bits = std::max(
        cell.max_mean_payload_bits, total / static_cast<double>(cell.replicates.size()));
  }
}

Json optional_number(double value) { return std::isfinite(value) ? Json(value) : Json(nullptr); }

Json config_json(const ProtocolConfig& cfg) {
  Json out = Json::object();
  for (const auto& [key, value] : cfg.to_key_values()) out[key] = value;
  return out;
}

Json signal_json(const SignalSpec& spec) {
  return Json{{"kind", to_string(spec.kind)},
              {"s", spec.s},
              {"L", spec.radius},
              {"J_truth", spec.truth_level},
              {"seed", spec.seed},
              {"ball", spec.ball == BallType::Sobolev ? "sobolev" : "holder"}};
}

Json slope_json(const std::optional<SlopeFit>& fit) {
  if (!fit) return nullptr;
  return Json{{"slope", fit->slope},
              {"intercept", fit->intercept},
              {"half_width", fit->half_width},
              {"points", fit->points}};
}

Json cell_json(const CellResult& cell) {
  Json out;
  out["axis_value"] = cell.axis_value;
  out["config"] = config_json(cell.config);
  if (cell.error) {
    out["status"] = "error";
    out["error"] = Json{{"code", to_string(*cell.error)}, {"message", cell.error_message}};
  } else {
    out["status"] = "ok";
  }
  out["mean_risk_l2"] = optional_number(cell.mean_risk_l2);
  out["se_risk_l2"] = optional_number(cell.se_risk_l2);
  out["mean_risk_linf"] = optional_number(cell.mean_risk_linf);
  out["se_risk_linf"] = optional_number(cell.se_risk_linf);
  out["mean_jhat"] = cell.mean_jhat ? Json(*cell.mean_jhat) : Json(nullptr);
  out["max_payload_bits"] = cell.max_payload_bits;
  out["max_mean_payload_bits"] = cell.max_mean_payload_bits;
  out["max_wire_bits"] = cell.max_wire_bits;
  out["overrun_replicates"] = cell.overrun_replicates;
  out["discarded_machines"] = cell.discarded_machines;
  out["truth_sup_norm"] = cell.truth_sup_norm;

  if (cell.theory) {
    const RegimeReport& t = *cell.theory;
    out["theory"] = Json{{"regime", to_string(t.regime)},
                         {"linf_regime", to_string(t.linf_regime)},
                         {"delta_n", t.delta_n},
                         {"delta_branch", to_string(t.branch)},
                         {"high_budget_threshold", t.high_budget_threshold},
                         {"low_budget_threshold", t.low_budget_threshold},
                         {"linf_high_budget_threshold", t.linf_high_budget_threshold},
                         {"lb_rate_l2", t.lb_rate_l2},
                         {"lb_rate_linf", t.lb_rate_linf},
                         {"standing_assumption", t.standing_assumption}};
  }
  if (cell.optimal) {
    out["optimal_level"] = Json{{"j_star", cell.optimal->level}, {"n_j", cell.optimal->sample_size}};
  }

  Json reps = Json::array();
  for (const ReplicateResult& rep : cell.replicates) {
    Json payload = Json::array();
    Json framing = Json::array();
    for (const MachineBits& bits : rep.machines) {
      payload.push_back(bits.payload_bits);
      framing.push_back(bits.framing_bits);
    }
    reps.push_back(Json{{"risk_l2", rep.risk_l2},
                        {"risk_linf", optional_number(rep.risk_linf)},
                        {"jhat", rep.jhat ? Json(*rep.jhat) : Json(nullptr)},
                        {"max_quantization_error", rep.max_quantization_error},
                        {"payload_bits", std::move(payload)},
                        {"framing_bits", std::move(framing)}});
  }
  out["replicates"] = std::move(reps);
  return out;
}

void csv_number(std::ostream& out, double value) {
  if (std::isfinite(value)) out << format_double(value);
}

}  // namespace

double risk_l2(const CoeffField& estimate, const CoeffField& truth) {
  return squared_distance(estimate, truth);
}

std::vector<double> level_errors(const CoeffField& estimate, const CoeffField& truth) {
  const int deepest = std::max(estimate.max_level(), truth.max_level());
  std::vector<double> out(static_cast<std::size_t>(deepest) + 1, 0.0);
  for (int j = 0; j <= deepest; ++j) {
    const std::int64_t width = std::int64_t{1} << j;
    for (std::int64_t k = 0; k < width; ++k) {
      const double a = j <= estimate.max_level() ? estimate.at(j, k) : 0.0;
      const double b = j <= truth.max_level() ? truth.at(j, k) : 0.0;
      out[static_cast<std::size_t>(j)] += (a - b) * (a - b);
    }
  }
  return out;
}

double risk_linf(const CoeffField& estimate, const CoeffField& truth, const WaveletBasis& basis,
                 std::size_t grid_size) {
  const int deepest = std::max(estimate.max_level(), truth.max_level());
  const std::size_t grid = grid_size == 0 ? std::size_t{1} << (deepest + 3) : grid_size;
  CoeffField difference = truth.resized(deepest);
  const CoeffField padded = estimate.resized(deepest);
  auto d = difference.values();
  const auto e = padded.values();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = e[i] - d[i];
  double sup = 0.0;
  for (double v : basis.synthesize(difference, grid)) sup = std::max(sup, std::abs(v));
  return sup;
}

SlopeFit fit_rate_slope(std::span<const std::pair<double, double>> points) {
  if (points.size() < 4) {
    fail(ErrorCode::DegenerateSpread, "slope fit needs at least 4 points, got " +
                                          std::to_string(points.size()));
  }
  std::vector<double> x, y;
  for (const auto& [n, risk] : points) {
    if (!(n > 0.0) || !(risk > 0.0) || !std::isfinite(risk)) {
      fail(ErrorCode::DegenerateSpread, "slope fit needs positive finite n and risk");
    }
    x.push_back(std::log2(n));
    y.push_back(std::log2(risk));
  }
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (*hi - *lo < 2.0) fail(ErrorCode::DegenerateSpread, "n values span less than 2 octaves");

  const double count = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= count;
  my /= count;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  SlopeFit fit;
  fit.points = x.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    ssr += r * r;
  }
  fit.half_width = 2.0 * std::sqrt(ssr / (count - 2.0) / sxx);
  return fit;
}

SweepAxis parse_sweep_axis(const std::string& text) {
  if (text == "n") return SweepAxis::N;
  if (text == "B") return SweepAxis::B;
  if (text == "m") return SweepAxis::M;
  if (text == "s") return SweepAxis::S;
  fail(ErrorCode::ConfigInvalid, "unknown sweep axis '" + text + "' (expected n, B, m or s)");
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::N: return "n";
    case SweepAxis::B: return "B";
    case SweepAxis::M: return "m";
    case SweepAxis::S: return "s";
  }
  return "unknown";
}

void ExperimentConfig::validate() const {
  if (replicates < 1) fail(ErrorCode::ConfigInvalid, "replicates must be >= 1");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) fail(ErrorCode::ConfigInvalid, "sigma must be >= 0");
  if (signal.truth_level < 0 || signal.truth_level > 24) {
    fail(ErrorCode::ConfigInvalid, "J_truth must lie in [0, 24]");
  }
  protocol.validate();
}

std::uint64_t replicate_seed(std::uint64_t master, std::size_t cell, std::size_t replicate) {
  return split_seed(master, {cell, replicate});
}

ExperimentConfig apply_axis(const ExperimentConfig& base, SweepAxis axis, double value) {
  ExperimentConfig cfg = base;
  switch (axis) {
    case SweepAxis::N: cfg.protocol.n = static_cast<std::int64_t>(std::llround(value)); break;
    case SweepAxis::B: cfg.protocol.B = value; break;
    case SweepAxis::M: cfg.protocol.m = static_cast<int>(std::lround(value)); break;
    case SweepAxis::S:
      cfg.protocol.s = value;
      cfg.signal.s = value;
      break;
  }
  if (cfg.budget_family && axis != SweepAxis::B) {
    cfg.protocol.B = std::ceil(cfg.budget_family->at(static_cast<double>(cfg.protocol.n)));
  }
  return cfg;
}

CellResult run_cell(const ExperimentConfig& cfg, std::size_t cell_index, double axis_value,
                    Executor* executor) {
  CellResult cell;
  cell.axis_value = axis_value;
  cell.config = cfg.protocol;
  try {
    cfg.validate();
    const WaveletBasis basis =
        WaveletBasis::from_name(cfg.protocol.family, cfg.protocol.refinement_depth);
    const CoeffField truth = make_signal(cfg.signal);
    cell.truth_sup_norm = sup_norm_on_grid(basis, truth);
    cell.discarded_machines = build_schedule(cfg.protocol).discarded;

    cell.replicates.resize(static_cast<std::size_t>(cfg.replicates));
    parallel_for(executor, cell.replicates.size(), [&](std::size_t r) {
      ProtocolConfig run_cfg = cfg.protocol;
      run_cfg.seed = replicate_seed(cfg.master_seed, cell_index, r);
      const auto data =
          generate_data(truth, basis, run_cfg.n, run_cfg.m, cfg.sigma, run_cfg.seed, nullptr);
      const ProtocolRun run = run_protocol(run_cfg, data, basis, nullptr);

      ReplicateResult& rep = cell.replicates[r];
      rep.risk_l2 = risk_l2(run.result.estimate, truth);
      rep.risk_linf = cfg.compute_linf ? risk_linf(run.result.estimate, truth, basis) : kNaN;
      rep.jhat = run.result.jhat;
      rep.max_quantization_error = run.max_quantization_error;
      for (std::size_t i = 0; i < run.result.ledger.machines(); ++i) {
        rep.machines.push_back(run.result.ledger.machine(i));
      }
    });
    summarize(cell);
  } catch (const Error& e) {
    cell.replicates.clear();
    cell.error = e.code();
    cell.error_message = e.what();
    cell.mean_risk_l2 = cell.se_risk_l2 = cell.mean_risk_linf = cell.se_risk_linf = kNaN;
  }

  try {
    const ProtocolConfig& p = cfg.protocol;
    cell.theory = classify_regime(p.n, p.m, p.B, p.s, p.L);
    cell.optimal = optimal_level(p.n, p.m, p.B, p.s, p.L, p.norm, p.s_min);
  } catch (const Error&) {
    // Reference values are optional decorations of the cell.
  }
  return cell;
}

ExperimentReport run_sweep(const ExperimentConfig& base, SweepAxis axis,
                           std::span<const double> values, Executor* executor) {
  ExperimentReport report;
  report.base = base;
  report.axis = axis;
  for (std::size_t c = 0; c < values.size(); ++c) {
    report.cells.push_back(run_cell(apply_axis(base, axis, values[c]), c, values[c], executor));
  }

  if (axis == SweepAxis::N) {
    std::vector<std::pair<double, double>> l2, linf;
    for (const CellResult& cell : report.cells) {
      if (!cell.ok()) continue;
      l2.emplace_back(static_cast<double>(cell.config.n), cell.mean_risk_l2);
      if (base.compute_linf) linf.emplace_back(static_cast<double>(cell.config.n), cell.mean_risk_linf);
    }
    try {
      report.slope_l2 = fit_rate_slope(l2);
    } catch (const Error&) {
    }
    try {
      if (base.compute_linf) report.slope_linf = fit_rate_slope(linf);
    } catch (const Error&) {
    }
  }
  return report;
}

TauCalibration calibrate_tau(const ExperimentConfig& cfg, double target, Executor* executor) {
  if (!(target > 0.0 && target <= 1.0)) fail(ErrorCode::InvalidArgument, "target must lie in (0, 1]");
  cfg.validate();
  ProtocolConfig protocol = cfg.protocol;
  protocol.mode = Mode::Adaptive;
  const Schedule schedule = build_schedule(protocol);
  const WaveletBasis basis = WaveletBasis::from_name(protocol.family, protocol.refinement_depth);
  const CoeffField zero(0);

  TauCalibration out;
  out.target = target;
  out.zero_taus.resize(static_cast<std::size_t>(cfg.replicates));
  parallel_for(executor, out.zero_taus.size(), [&](std::size_t r) {
    ProtocolConfig run_cfg = protocol;
    run_cfg.seed = replicate_seed(cfg.master_seed, 0, r);
    const auto data = generate_data(zero, basis, run_cfg.n, run_cfg.m, cfg.sigma, run_cfg.seed);
    const ProtocolRun run = run_protocol(run_cfg, data, basis, nullptr);
    const auto candidates = truncation_estimates(run.result.aggregate, schedule.adaptive->max_level);
    out.zero_taus[r] = lepski_zero_tau(candidates, run.result.sample_sizes, protocol.norm, basis);
  });

  std::vector<double> sorted = out.zero_taus;
  std::sort(sorted.begin(), sorted.end());
  const auto needed = static_cast<std::size_t>(
      std::ceil(target * static_cast<double>(sorted.size()) - 1e-9));
  out.tau = sorted[std::max<std::size_t>(needed, 1) - 1];
  const auto hits = std::count_if(sorted.begin(), sorted.end(), [&](double t) { return t <= out.tau; });
  out.zero_rate = static_cast<double>(hits) / static_cast<double>(sorted.size());
  return out;
}

void write_report_json(std::ostream& out, const ExperimentReport& report) {
  Json root;
  root["axis"] = to_string(report.axis);
  root["base"] = Json{{"protocol", config_json(report.base.protocol)},
                      {"signal", signal_json(report.base.signal)},
                      {"sigma", report.base.sigma},
                      {"replicates", report.base.replicates},
                      {"master_seed", report.base.master_seed},
                      {"budget_family", report.base.budget_family
                                            ? Json(report.base.budget_family->to_string())
                                            : Json(nullptr)},
                      {"compute_linf", report.base.compute_linf}};
  root["slope_l2"] = slope_json(report.slope_l2);
  root["slope_linf"] = slope_json(report.slope_linf);
  Json cells = Json::array();
  for (const CellResult& cell : report.cells) cells.push_back(cell_json(cell));
  root["cells"] = std::move(cells);
  out << root.dump(2) << '\n';
}

void write_report_csv(std::ostream& out, const ExperimentReport& report) {
  out << "n,m,B,s,mode,mean_risk_l2,se,mean_risk_linf,mean_jhat,max_payload_bits,status\n";
  for (const CellResult& cell : report.cells) {
    const ProtocolConfig& p = cell.config;
    out << p.n << ',' << p.m << ',' << format_double(p.B) << ',' << format_double(p.s) << ','
        << to_string(p.mode) << ',';
    csv_number(out, cell.mean_risk_l2);
    out << ',';
    csv_number(out, cell.se_risk_l2);
    out << ',';
    csv_number(out, cell.mean_risk_linf);
    out << ',';
    if (cell.mean_jhat) csv_number(out, *cell.mean_jhat);
    out << ',' << cell.max_payload_bits << ','
        << (cell.error ? to_string(*cell.error) : "ok") << '\n';
  }
}

}  // namespace distwave
