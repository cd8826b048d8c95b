#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "distwave/harness.hpp"
#include "distwave/theory.hpp"

namespace distwave::cli {

struct TheoryGrid {
  std::vector<std::int64_t> n;
  std::vector<SequenceFamily> m;
  std::vector<SequenceFamily> B;
  std::vector<double> s;
};

/// Parsed contents of an INI-style config:
///
///   [protocol]   n m B D s L s_min s_max tau norm mode family depth seed
///   [signal]     kind s L J_truth sigma seed ball
///   [experiment] replicates linf
///   [sweep]      axis values
///   [theory]     n m B s           (comma-separated lists)
///
/// B may be an expression in n such as "n^0.4*log2n"; it is then
/// re-evaluated (rounded up) for every n.
struct FileConfig {
  ExperimentConfig experiment;
  std::optional<SweepAxis> sweep_axis;
  std::vector<double> sweep_values;
  TheoryGrid theory;
};

/// Throws ConfigInvalid on unknown keys, bad values, or a config that
/// fails validation; Io when the file cannot be read.
FileConfig load_config(const std::filesystem::path& path);
FileConfig parse_config(const std::string& text);

/// "4096, 2^13, 16384" -> numbers.
std::vector<double> parse_number_list(const std::string& text);

}  // namespace distwave::cli
