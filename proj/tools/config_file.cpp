#include "config_file.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "distwave/error.hpp"

namespace distwave::cli {

namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\"");
  if (first == std::string::npos) return "";
  const auto last = text.find_last_not_of(" \t\"");
  return text.substr(first, last - first + 1);
}

// Drops a trailing "; comment" or "# comment" that follows whitespace.
std::string strip_comment(const std::string& text) {
  for (std::size_t i = 1; i < text.size(); ++i) {
    if ((text[i] == ';' || text[i] == '#') && (text[i - 1] == ' ' || text[i - 1] == '\t')) {
      return text.substr(0, i);
    }
  }
  return text;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool to_double(const std::string& text, double& value) {
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

double number(const std::string& key, const std::string& text) {
  double value = 0.0;
  const auto caret = text.find('^');
  if (caret != std::string::npos) {
    double base = 0.0, exponent = 0.0;
    if (to_double(text.substr(0, caret), base) && to_double(text.substr(caret + 1), exponent)) {
      return std::pow(base, exponent);
    }
  } else if (to_double(text, value)) {
    return value;
  }
  fail(ErrorCode::ConfigInvalid, "key '" + key + "': cannot parse '" + text + "'");
}

bool boolean(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  fail(ErrorCode::ConfigInvalid, "key '" + key + "': expected true or false");
}

void check_keys(const pt::ptree& section, const std::string& name,
                const std::set<std::string>& allowed) {
  for (const auto& [key, value] : section) {
    if (!allowed.contains(key)) {
      fail(ErrorCode::ConfigInvalid, "unknown key '" + key + "' in [" + name + "]");
    }
  }
}

int default_truth_level(const ProtocolConfig& protocol) {
  return protocol.family == "haar" ? 16 : protocol.refinement_depth - 4;
}

}  // namespace

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  for (const std::string& item : split_list(text)) out.push_back(number("values", item));
  return out;
}

FileConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorCode::ConfigInvalid, std::string("config syntax: ") + e.what());
  }
  for (auto& [name, section] : tree) {
    for (auto& [key, value] : section) value.data() = trim(strip_comment(value.data()));
    static const std::set<std::string> kSections{"protocol", "signal", "experiment", "sweep",
                                                 "theory"};
    if (!kSections.contains(name)) fail(ErrorCode::ConfigInvalid, "unknown section [" + name + "]");
  }

  FileConfig out;
  ExperimentConfig& exp = out.experiment;

  const pt::ptree empty;
  const pt::ptree& protocol = tree.get_child("protocol", empty);
  check_keys(protocol, "protocol",
             {"n", "m", "B", "D", "s", "L", "s_min", "s_max", "tau", "norm", "mode", "family",
              "depth", "seed"});
  std::map<std::string, std::string> values = ProtocolConfig{}.to_key_values();
  values["B"] = "1";
  for (const auto& [key, value] : protocol) values[key] = trim(value.data());
  const std::string budget_text = values["B"];
  double budget = 0.0;
  const bool budget_is_number = to_double(budget_text, budget);
  if (!budget_is_number) {
    exp.budget_family = SequenceFamily::parse(budget_text);
    values["B"] = "1";  // replaced below once n is known
  }
  values["n"] = std::to_string(static_cast<std::int64_t>(number("n", values["n"])));
  exp.protocol = ProtocolConfig::from_key_values(values);
  if (!protocol.count("B")) fail(ErrorCode::ConfigInvalid, "[protocol] needs a budget B");
  if (exp.budget_family) {
    exp.protocol.B = std::ceil(exp.budget_family->at(static_cast<double>(exp.protocol.n)));
  }
  exp.master_seed = exp.protocol.seed;

  const pt::ptree& signal = tree.get_child("signal", empty);
  check_keys(signal, "signal", {"kind", "s", "L", "J_truth", "sigma", "seed", "ball"});
  auto text_of = [](const pt::ptree& section, const std::string& key, const std::string& fallback) {
    return trim(section.get<std::string>(key, fallback));
  };
  exp.signal.kind = parse_signal_kind(text_of(signal, "kind", "worst_case"));
  exp.signal.s = number("s", text_of(signal, "s", format_double(exp.protocol.s)));
  exp.signal.radius = number("L", text_of(signal, "L", format_double(exp.protocol.L)));
  exp.signal.truth_level = static_cast<int>(
      number("J_truth", text_of(signal, "J_truth", std::to_string(default_truth_level(exp.protocol)))));
  exp.signal.seed = static_cast<std::uint64_t>(number("seed", text_of(signal, "seed", "0")));
  const std::string ball = text_of(signal, "ball", exp.protocol.norm == Norm::L2 ? "sobolev" : "holder");
  if (ball == "sobolev") {
    exp.signal.ball = BallType::Sobolev;
  } else if (ball == "holder") {
    exp.signal.ball = BallType::Holder;
  } else {
    fail(ErrorCode::ConfigInvalid, "ball must be sobolev or holder");
  }
  exp.sigma = number("sigma", text_of(signal, "sigma", "1"));

  const pt::ptree& experiment = tree.get_child("experiment", empty);
  check_keys(experiment, "experiment", {"replicates", "linf"});
  exp.replicates = static_cast<int>(number("replicates", text_of(experiment, "replicates", "10")));
  exp.compute_linf = boolean("linf", text_of(experiment, "linf",
                                             exp.protocol.norm == Norm::Linfty ? "true" : "false"));

  const pt::ptree& sweep = tree.get_child("sweep", empty);
  check_keys(sweep, "sweep", {"axis", "values"});
  if (sweep.count("axis")) {
    out.sweep_axis = parse_sweep_axis(text_of(sweep, "axis", "n"));
    out.sweep_values = parse_number_list(text_of(sweep, "values", ""));
  }

  const pt::ptree& theory = tree.get_child("theory", empty);
  check_keys(theory, "theory", {"n", "m", "B", "s"});
  for (double n : parse_number_list(text_of(theory, "n", ""))) {
    out.theory.n.push_back(static_cast<std::int64_t>(std::llround(n)));
  }
  for (const std::string& item : split_list(text_of(theory, "m", ""))) {
    out.theory.m.push_back(SequenceFamily::parse(item));
  }
  for (const std::string& item : split_list(text_of(theory, "B", ""))) {
    out.theory.B.push_back(SequenceFamily::parse(item));
  }
  out.theory.s = parse_number_list(text_of(theory, "s", ""));

  exp.validate();
  return out;
}

FileConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot read config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace distwave::cli
