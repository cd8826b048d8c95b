#include "distwave/protocol_config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "distwave/error.hpp"

namespace distwave {

namespace {

const std::string& require(const std::map<std::string, std::string>& values,
                           const std::string& key) {
  const auto it = values.find(key);
  if (it == values.end()) fail(ErrorCode::ConfigInvalid, "missing protocol key '" + key + "'");
  return it->second;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    fail(ErrorCode::ConfigInvalid, "key '" + key + "': cannot parse '" + text + "'");
  }
  return value;
}

bool valid_family(const std::string& family) {
  if (family == "haar") return true;
  const std::string prefix = "daubechies";
  if (family.rfind(prefix, 0) != 0 || family.size() == prefix.size()) return false;
  const std::string digits = family.substr(prefix.size());
  if (digits.find_first_not_of("0123456789") != std::string::npos) return false;
  const int moments = std::stoi(digits);
  return moments >= 2 && moments <= 10;
}

}  // namespace

Mode parse_mode(const std::string& text) {
  if (text == "nonadaptive_i") return Mode::NonAdaptiveI;
  if (text == "nonadaptive_ii") return Mode::NonAdaptiveII;
  if (text == "linfty_combined") return Mode::LinftyCombined;
  if (text == "adaptive") return Mode::Adaptive;
  fail(ErrorCode::ConfigInvalid, "unknown mode '" + text +
                                     "' (expected nonadaptive_i, nonadaptive_ii, "
                                     "linfty_combined or adaptive)");
}

Norm parse_norm(const std::string& text) {
  if (text == "l2") return Norm::L2;
  if (text == "linf" || text == "linfty") return Norm::Linfty;
  fail(ErrorCode::ConfigInvalid, "unknown norm '" + text + "' (expected l2 or linf)");
}

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::NonAdaptiveI: return "nonadaptive_i";
    case Mode::NonAdaptiveII: return "nonadaptive_ii";
    case Mode::LinftyCombined: return "linfty_combined";
    case Mode::Adaptive: return "adaptive";
  }
  return "unknown";
}

std::string to_string(Norm norm) {
  return norm == Norm::L2 ? "l2" : "linf";
}

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) return "nan";
  return std::string(buffer, ptr);
}

void ProtocolConfig::validate() const {
  auto reject = [](const std::string& why) { fail(ErrorCode::ConfigInvalid, why); };
  if (n < 2) reject("n must be at least 2");
  if (m < 1) reject("m must be at least 1");
  if (m > n) reject("m must not exceed n");
  if (n % m != 0) {
    reject("m = " + std::to_string(m) + " does not divide n = " + std::to_string(n) +
           " (n/m must be an integer)");
  }
  if (!(B > 0.0) || !std::isfinite(B)) reject("B must be a positive finite bit budget");
  if (!(D > 0.0) || !std::isfinite(D)) reject("D must be positive");
  if (!(s > 0.0)) reject("s must be positive");
  if (!(L > 0.0)) reject("L must be positive");
  if (!(s_min >= 0.0)) reject("s_min must be non-negative");
  if (!(s_max > s_min)) reject("s_max must exceed s_min");
  if (!(tau > 1.0)) reject("tau must exceed 1");
  if (!valid_family(family)) reject("family must be 'haar' or 'daubechiesN' with 2 <= N <= 10");
  if (refinement_depth < 4 || refinement_depth > 24) reject("depth must be in [4, 24]");
}

std::map<std::string, std::string> ProtocolConfig::to_key_values() const {
  return {
      {"n", std::to_string(n)},
      {"m", std::to_string(m)},
      {"B", format_double(B)},
      {"D", format_double(D)},
      {"s", format_double(s)},
      {"L", format_double(L)},
      {"s_min", format_double(s_min)},
      {"s_max", format_double(s_max)},
      {"tau", format_double(tau)},
      {"norm", to_string(norm)},
      {"mode", to_string(mode)},
      {"family", family},
      {"depth", std::to_string(refinement_depth)},
      {"seed", std::to_string(seed)},
  };
}

ProtocolConfig ProtocolConfig::from_key_values(const std::map<std::string, std::string>& values) {
  ProtocolConfig cfg;
  cfg.n = parse_number<std::int64_t>("n", require(values, "n"));
  cfg.m = parse_number<int>("m", require(values, "m"));
  cfg.B = parse_number<double>("B", require(values, "B"));
  cfg.D = parse_number<double>("D", require(values, "D"));
  cfg.s = parse_number<double>("s", require(values, "s"));
  cfg.L = parse_number<double>("L", require(values, "L"));
  cfg.s_min = parse_number<double>("s_min", require(values, "s_min"));
  cfg.s_max = parse_number<double>("s_max", require(values, "s_max"));
  cfg.tau = parse_number<double>("tau", require(values, "tau"));
  cfg.norm = parse_norm(require(values, "norm"));
  cfg.mode = parse_mode(require(values, "mode"));
  cfg.family = require(values, "family");
  cfg.refinement_depth = parse_number<int>("depth", require(values, "depth"));
  cfg.seed = parse_number<std::uint64_t>("seed", require(values, "seed"));
  return cfg;
}

std::uint64_t ProtocolConfig::hash() const {
  std::ostringstream text;
  for (const auto& [key, value] : to_key_values()) text << key << '=' << value << '\n';
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text.str()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace distwave
