#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "distwave/protocol_config.hpp"

namespace distwave {

/// Half-open range of flat coefficient indices (see flat_index).
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  bool empty() const noexcept { return end <= begin; }
  bool contains(std::size_t flat) const noexcept { return flat >= begin && flat < end; }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

enum class GroupKind {
  Shared,     // every machine transmits the same prefix
  Block,      // grouped schedules: group g owns one block of the prefix
  Low,        // adaptive group I: all levels below j_B
  Level,      // adaptive group I_{t,l}: one block of level j_B + t
  Discarded,  // floor-with-discard leftovers; transmit nothing
};

std::string to_string(GroupKind kind);

struct Assignment {
  GroupKind kind = GroupKind::Discarded;
  int group = 0;         // block index g (0-based) for Block
  int level_offset = 0;  // t for Level
  int sub_group = 0;     // l (1-based) for Level
  IndexRange range;
};

/// The adaptive machine partition and the effective sample sizes n_j.
struct AdaptiveLayout {
  int cut_level = 0;        // j_B = floor(log2 floor(B / log2 n))
  int max_level = 0;        // j_max
  int level_groups = 0;     // eta~ = j_max - j_B (0 if negative)
  int low_group_size = 0;   // |I| = floor(m / 2)
  int level_group_size = 0; // floor(ceil(m / 2) / eta~)
  std::vector<int> sub_group_sizes;  // floor(2^-t level_group_size), t < eta~
  std::vector<double> sample_sizes;  // n_j for j = 0..j_max
  bool feasible = true;
  std::string infeasibility;
};

/// Partition arithmetic only; never throws for infeasible layouts.
AdaptiveLayout adaptive_layout(std::int64_t n, int m, double B, double s_min);

struct Schedule {
  Mode mode = Mode::NonAdaptiveI;
  std::vector<Assignment> machines;
  int groups = 0;              // eta, or the number of I_{t,l} blocks + 1
  std::size_t block_size = 0;  // floor(B / log2 n) where used
  std::size_t scheduled = 0;   // scheduled coefficients form [0, scheduled)
  int max_level = 0;           // deepest level touched (0 when empty)
  int discarded = 0;
  std::optional<AdaptiveLayout> adaptive;

  /// Machines whose range contains `flat`, in machine order.
  std::vector<int> owners(std::size_t flat) const;
};

/// Deterministic schedule for the configured mode. Throws
/// InfeasibleSchedule when a required group would be empty, when
/// floor(B / log2 n) = 0 for modes that need it, or when the nominal
/// payload of a machine would exceed B.
Schedule build_schedule(const ProtocolConfig& cfg);

/// Nominal paper-accounting payload of one coefficient with |x| < 2.
int nominal_message_bits(const CodecParams& params);

/// floor/ceil that absorb a few ulps of error around integers.
std::int64_t floor_tolerant(double x);
std::int64_t ceil_tolerant(double x);

}  // namespace distwave
