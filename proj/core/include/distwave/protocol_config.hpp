#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "distwave/bitcodec.hpp"

namespace distwave {

enum class Mode { NonAdaptiveI, NonAdaptiveII, LinftyCombined, Adaptive };
enum class Norm { L2, Linfty };

Mode parse_mode(const std::string& text);
Norm parse_norm(const std::string& text);
std::string to_string(Mode mode);
std::string to_string(Norm norm);

/// Everything one protocol run needs. Parameter names follow the usual
/// notation: n total samples, m machines, B per-machine budget in bits,
/// D codec precision exponent, s/L smoothness and radius, tau the Lepski
/// constant.
struct ProtocolConfig {
  std::int64_t n = 4096;
  int m = 16;
  double B = 0.0;
  double D = 0.5;
  double s = 1.0;
  double L = 1.0;
  double s_min = 0.5;
  double s_max = 4.0;
  double tau = 4.0;
  Norm norm = Norm::L2;
  Mode mode = Mode::NonAdaptiveI;
  std::string family = "haar";
  int refinement_depth = 12;
  std::uint64_t seed = 1;

  /// Throws ConfigInvalid on the first violated rule.
  void validate() const;

  CodecParams codec() const { return CodecParams{n, D}; }

  /// Canonical key=value form; round-trips through from_key_values.
  std::map<std::string, std::string> to_key_values() const;
  static ProtocolConfig from_key_values(const std::map<std::string, std::string>& values);

  /// FNV-1a of the canonical key=value text.
  std::uint64_t hash() const;

  friend bool operator==(const ProtocolConfig&, const ProtocolConfig&) = default;
};

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace distwave
