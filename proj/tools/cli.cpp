#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "config_file.hpp"
#include "distwave/error.hpp"
#include "distwave/harness.hpp"
#include "distwave/parallel.hpp"
#include "distwave/protocols.hpp"
#include "distwave/theory.hpp"
#include "distwave/transcript.hpp"

namespace distwave::cli {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

struct Manifest {
  std::string command;
  fs::path config;
  fs::path out = ".";
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;
  std::string format = "json";
  fs::path transcript;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigInvalid:
    case ErrorCode::InvalidArgument:
    case ErrorCode::LevelTooDeep:
    case ErrorCode::NormViolation:
      return kConfigInvalid;
    case ErrorCode::InfeasibleSchedule:
    case ErrorCode::Framing:
    case ErrorCode::MissingMessage:
      return kInfeasible;
    case ErrorCode::Io:
      return kIo;
    case ErrorCode::NonFinite:
    case ErrorCode::DegenerateSpread:
      return kFailure;
  }
  return kFailure;
}

FileConfig load(const Manifest& manifest) {
  if (manifest.config.empty()) fail(ErrorCode::ConfigInvalid, "--config is required");
  FileConfig cfg = load_config(manifest.config);
  if (manifest.seed) {
    cfg.experiment.master_seed = *manifest.seed;
    cfg.experiment.protocol.seed = *manifest.seed;
  }
  return cfg;
}

fs::path prepare_out(const Manifest& manifest) {
  std::error_code ec;
  fs::create_directories(manifest.out, ec);
  if (ec || !fs::is_directory(manifest.out)) {
    fail(ErrorCode::Io, "cannot create output directory " + manifest.out.string());
  }
  return manifest.out;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream file(path);
  if (!file) fail(ErrorCode::Io, "cannot write " + path.string());
  return file;
}

void close_output(std::ofstream& file, const fs::path& path) {
  file.flush();
  if (!file) fail(ErrorCode::Io, "failed writing " + path.string());
}

std::unique_ptr<Executor> make_executor(const Manifest& manifest) {
  if (manifest.threads <= 1) return nullptr;
  return std::make_unique<Executor>(manifest.threads);
}

Json config_json(const ProtocolConfig& cfg) {
  Json out = Json::object();
  for (const auto& [key, value] : cfg.to_key_values()) out[key] = value;
  return out;
}

Json number_or_null(double value) { return std::isfinite(value) ? Json(value) : Json(nullptr); }

int cmd_run(const Manifest& manifest, std::ostream& out) {
  const FileConfig file = load(manifest);
  const ExperimentConfig& exp = file.experiment;
  const fs::path dir = prepare_out(manifest);
  const auto executor = make_executor(manifest);

  ProtocolConfig cfg = exp.protocol;
  cfg.seed = exp.master_seed;
  const WaveletBasis basis = WaveletBasis::from_name(cfg.family, cfg.refinement_depth);
  const CoeffField truth = make_signal(exp.signal);
  const auto data = generate_data(truth, basis, cfg.n, cfg.m, exp.sigma, cfg.seed, executor.get());
  const ProtocolRun run = run_protocol(cfg, data, basis, executor.get());

  const double l2 = risk_l2(run.result.estimate, truth);
  const double linf = risk_linf(run.result.estimate, truth, basis);
  const MachineBits totals = run.result.ledger.totals();
  const LengthAudit audit = expected_length_audit(run.result.ledger, cfg.codec());

  save_transcript(dir / "transcript.dwt", run.transcript);

  if (manifest.format == "csv") {
    const fs::path path = dir / "report.csv";
    std::ofstream csv = open_output(path);
    csv << "n,m,B,s,mode,risk_l2,risk_linf,jhat,max_payload_bits,payload_bits,framing_bits\n";
    csv << cfg.n << ',' << cfg.m << ',' << format_double(cfg.B) << ',' << format_double(cfg.s)
        << ',' << to_string(cfg.mode) << ',' << format_double(l2) << ',' << format_double(linf)
        << ',' << (run.result.jhat ? std::to_string(*run.result.jhat) : "") << ','
        << run.result.ledger.max_payload_bits() << ',' << totals.payload_bits << ','
        << totals.framing_bits << '\n';
    close_output(csv, path);
  } else {
    Json report;
    report["config"] = config_json(cfg);
    report["signal"] = Json{{"kind", to_string(exp.signal.kind)},
                            {"s", exp.signal.s},
                            {"L", exp.signal.radius},
                            {"J_truth", exp.signal.truth_level},
                            {"sigma", exp.sigma},
                            {"sup_norm", sup_norm_on_grid(basis, truth)}};
    report["schedule"] = Json{{"groups", run.schedule.groups},
                              {"scheduled_coefficients", run.schedule.scheduled},
                              {"max_level", run.schedule.max_level},
                              {"discarded_machines", run.schedule.discarded}};
    report["risk_l2"] = l2;
    report["risk_linf"] = linf;
    report["jhat"] = run.result.jhat ? Json(*run.result.jhat) : Json(nullptr);
    report["max_quantization_error"] = run.max_quantization_error;
    report["totals"] = Json{{"messages", totals.messages},
                            {"payload_bits", totals.payload_bits},
                            {"framing_bits", totals.framing_bits},
                            {"wire_bits", totals.wire_bits()},
                            {"max_payload_bits", run.result.ledger.max_payload_bits()}};
    report["length_audit"] = Json{{"mean_payload_bits", audit.mean_payload_bits},
                                  {"mean_wire_bits", audit.mean_wire_bits},
                                  {"bound", audit.bound},
                                  {"violation", audit.violation}};
    report["overrun_machines"] = run.result.overrun_machines;
    Json machines = Json::array();
    for (std::size_t i = 0; i < run.result.ledger.machines(); ++i) {
      const MachineBits& bits = run.result.ledger.machine(i);
      machines.push_back(Json{{"machine", i},
                              {"messages", bits.messages},
                              {"payload_bits", bits.payload_bits},
                              {"framing_bits", bits.framing_bits}});
    }
    report["machines"] = std::move(machines);
    const fs::path path = dir / "report.json";
    std::ofstream json = open_output(path);
    json << report.dump(2) << '\n';
    close_output(json, path);
  }

  out << "mode " << to_string(cfg.mode) << "  n=" << cfg.n << " m=" << cfg.m
      << " B=" << format_double(cfg.B) << '\n';
  out << "risk_l2 " << format_double(l2) << "  risk_linf " << format_double(linf) << '\n';
  if (run.result.jhat) out << "jhat " << *run.result.jhat << '\n';
  out << "messages=" << totals.messages << " payload_bits=" << totals.payload_bits
      << " framing_bits=" << totals.framing_bits << " max_payload_bits="
      << run.result.ledger.max_payload_bits() << '\n';
  out << "wrote " << (dir / "transcript.dwt").string() << '\n';
  return kOk;
}

int cmd_audit(const Manifest& manifest, std::ostream& out) {
  const fs::path path =
      manifest.transcript.empty() ? manifest.out / "transcript.dwt" : manifest.transcript;
  const Transcript transcript = load_transcript(path);
  const AggregatedEstimate result = decode_transcript(transcript);
  const MachineBits totals = result.ledger.totals();
  const LengthAudit audit = expected_length_audit(result.ledger, transcript.config.codec());

  out << "OK\n";
  out << "machines=" << result.ledger.machines() << " messages=" << totals.messages
      << " payload_bits=" << totals.payload_bits << " framing_bits=" << totals.framing_bits
      << " wire_bits=" << totals.wire_bits()
      << " max_payload_bits=" << result.ledger.max_payload_bits() << '\n';
  out << "mean_payload_bits=" << format_double(audit.mean_payload_bits)
      << " bound=" << format_double(audit.bound)
      << (audit.violation ? " LENGTH-VIOLATION" : "") << '\n';
  if (result.jhat) out << "jhat=" << *result.jhat << '\n';
  if (!result.overrun_machines.empty()) {
    out << "budget overrun on " << result.overrun_machines.size() << " machines\n";
  }
  return kOk;
}

int cmd_sweep(const Manifest& manifest, std::ostream& out) {
  const FileConfig file = load(manifest);
  if (!file.sweep_axis) fail(ErrorCode::ConfigInvalid, "sweep needs a [sweep] section with axis");
  const fs::path dir = prepare_out(manifest);
  const auto executor = make_executor(manifest);

  const ExperimentReport report =
      run_sweep(file.experiment, *file.sweep_axis, file.sweep_values, executor.get());
  const fs::path path = dir / (manifest.format == "csv" ? "report.csv" : "report.json");
  std::ofstream stream = open_output(path);
  if (manifest.format == "csv") {
    write_report_csv(stream, report);
  } else {
    write_report_json(stream, report);
  }
  close_output(stream, path);

  write_report_csv(out, report);
  if (report.slope_l2) {
    out << "slope_l2 " << format_double(report.slope_l2->slope) << " +- "
        << format_double(report.slope_l2->half_width) << '\n';
  }
  if (report.slope_linf) {
    out << "slope_linf " << format_double(report.slope_linf->slope) << " +- "
        << format_double(report.slope_linf->half_width) << '\n';
  }
  out << "wrote " << path.string() << '\n';
  return kOk;
}

int cmd_theory(const Manifest& manifest, std::ostream& out) {
  const FileConfig file = load(manifest);
  const ProtocolConfig& base = file.experiment.protocol;
  const fs::path dir = prepare_out(manifest);

  Json rows = Json::array();
  std::ostringstream csv;
  csv << "n,m,B,s,regime,delta_n,lb_rate_l2,lb_rate_linf,j_star,s_min\n";
  for (std::int64_t n : file.theory.n) {
    for (const SequenceFamily& m_family : file.theory.m) {
      for (const SequenceFamily& B_family : file.theory.B) {
        for (double s : file.theory.s) {
          const double nd = static_cast<double>(n);
          const int m = static_cast<int>(std::max<long long>(std::llround(m_family.at(nd)), 1));
          const double B = B_family.at(nd);
          const RegimeReport report = classify_regime(n, m, B, s, base.L);
          const double s_min = s_min_asymptotic(m_family, B_family);
          std::optional<int> j_star;
          try {
            j_star = optimal_level(n, m, B, s, base.L, base.norm, base.s_min).level;
          } catch (const Error&) {
          }
          csv << n << ',' << m << ',' << format_double(B) << ',' << format_double(s) << ','
              << to_string(report.regime) << ',' << format_double(report.delta_n) << ','
              << format_double(report.lb_rate_l2) << ',' << format_double(report.lb_rate_linf)
              << ',' << (j_star ? std::to_string(*j_star) : "") << ',' << format_double(s_min)
              << '\n';
          rows.push_back(Json{{"n", n},
                              {"m", m},
                              {"B", B},
                              {"s", s},
                              {"regime", to_string(report.regime)},
                              {"delta_n", report.delta_n},
                              {"lb_rate_l2", report.lb_rate_l2},
                              {"lb_rate_linf", report.lb_rate_linf},
                              {"j_star", j_star ? Json(*j_star) : Json(nullptr)},
                              {"s_min", number_or_null(s_min)}});
        }
      }
    }
  }

  const fs::path path = dir / (manifest.format == "csv" ? "theory.csv" : "theory.json");
  std::ofstream stream = open_output(path);
  if (manifest.format == "csv") {
    stream << csv.str();
  } else {
    stream << rows.dump(2) << '\n';
  }
  close_output(stream, path);
  out << csv.str();
  return kOk;
}

int cmd_calibrate_tau(const Manifest& manifest, std::ostream& out) {
  const FileConfig file = load(manifest);
  const fs::path dir = prepare_out(manifest);
  const auto executor = make_executor(manifest);
  const TauCalibration calibration = calibrate_tau(file.experiment, 0.95, executor.get());

  const fs::path path = dir / (manifest.format == "csv" ? "calibration.csv" : "calibration.json");
  std::ofstream stream = open_output(path);
  if (manifest.format == "csv") {
    stream << "replicate,zero_tau\n";
    for (std::size_t r = 0; r < calibration.zero_taus.size(); ++r) {
      stream << r << ',' << format_double(calibration.zero_taus[r]) << '\n';
    }
  } else {
    Json report;
    report["config"] = config_json(file.experiment.protocol);
    report["sigma"] = file.experiment.sigma;
    report["replicates"] = file.experiment.replicates;
    report["target"] = calibration.target;
    report["tau"] = calibration.tau;
    report["zero_rate"] = calibration.zero_rate;
    report["zero_taus"] = calibration.zero_taus;
    stream << report.dump(2) << '\n';
  }
  close_output(stream, path);

  out << "tau " << format_double(calibration.tau) << '\n';
  out << "jhat=0 in " << format_double(100.0 * calibration.zero_rate) << "% of "
      << calibration.zero_taus.size() << " replicates\n";
  if (calibration.tau <= 1.0) out << "note: any tau > 1 meets the target\n";
  return kOk;
}

void add_common(CLI::App* sub, Manifest& manifest, bool needs_config) {
  auto* config = sub->add_option("--config", manifest.config, "INI config file");
  if (needs_config) config->required();
  sub->add_option("--out", manifest.out, "output directory")->capture_default_str();
  sub->add_option("--seed", manifest.seed, "master seed (overrides [protocol] seed)");
  sub->add_option("--threads", manifest.threads, "worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--format", manifest.format, "report format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Distributed wavelet regression under bit budgets"};
  app.name("distwave");
  app.require_subcommand(1);

  Manifest manifest;
  struct Entry {
    const char* name;
    const char* help;
    int (*handler)(const Manifest&, std::ostream&);
    bool needs_config;
  };
  const Entry entries[] = {
      {"run", "execute one protocol run and write transcript + report", cmd_run, true},
      {"sweep", "Monte Carlo sweep over one axis", cmd_sweep, true},
      {"theory", "reference curves for the [theory] grid", cmd_theory, true},
      {"calibrate-tau", "pilot the Lepski constant on the zero signal", cmd_calibrate_tau, true},
      {"audit", "replay a transcript and verify bit accounting", cmd_audit, false},
  };
  for (const Entry& entry : entries) {
    CLI::App* sub = app.add_subcommand(entry.name, entry.help);
    add_common(sub, manifest, entry.needs_config);
    if (std::string(entry.name) == "audit") {
      sub->add_option("--transcript", manifest.transcript, "transcript file");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigInvalid;
  }

  for (const Entry& entry : entries) {
    if (app.got_subcommand(entry.name)) {
      try {
        return entry.handler(manifest, out);
      } catch (const Error& e) {
        err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
        return exit_code_for(e.code());
      } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
      }
    }
  }
  return kFailure;
}

}  // namespace distwave::cli
