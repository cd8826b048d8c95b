#include "distwave/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "distwave/coeff_field.hpp"
#include "distwave/error.hpp"

namespace distwave {

namespace {

double log2n(std::int64_t n) { return std::log2(static_cast<double>(n)); }

constexpr double kMaxBlock = 0x1p40;
constexpr int kMaxScheduledLevel = 24;

std::size_t block_size_for(const ProtocolConfig& cfg) {
  const double ratio = std::min(cfg.B / log2n(cfg.n), kMaxBlock);
  return static_cast<std::size_t>(std::max<std::int64_t>(floor_tolerant(ratio), 0));
}

void require_block(std::size_t block, const ProtocolConfig& cfg) {
  if (block == 0) {
    fail(ErrorCode::InfeasibleSchedule,
         "floor(B / log2 n) = 0 for B = " + format_double(cfg.B) + ", n = " +
             std::to_string(cfg.n) + "; this mode needs B >= log2 n");
  }
}

int level_of_end(std::size_t end) {
  return end == 0 ? 0 : level_shift(end - 1).level;
}

void finish(Schedule& schedule, const ProtocolConfig& cfg) {
  std::size_t scheduled = 0;
  int discarded = 0;
  std::size_t busiest = 0;
  for (const Assignment& a : schedule.machines) {
    scheduled = std::max(scheduled, a.range.end);
    busiest = std::max(busiest, a.range.size());
    if (a.kind == GroupKind::Discarded) ++discarded;
  }
  if (scheduled > (std::size_t{1} << (kMaxScheduledLevel + 1)) - 1) {
    fail(ErrorCode::InfeasibleSchedule, "schedule reaches beyond level " +
                                            std::to_string(kMaxScheduledLevel) +
                                            "; reduce B or raise s");
  }
  schedule.scheduled = scheduled;
  schedule.max_level = level_of_end(scheduled);
  schedule.discarded = discarded;

  const auto nominal = static_cast<double>(busiest) * nominal_message_bits(cfg.codec());
  if (nominal > cfg.B) {
    fail(ErrorCode::InfeasibleSchedule,
         "a machine is scheduled " + std::to_string(busiest) + " coefficients (" +
             format_double(nominal) + " nominal bits), exceeding B = " + format_double(cfg.B));
  }
}

Schedule shared_schedule(const ProtocolConfig& cfg) {
  const double smooth_cut = std::pow(static_cast<double>(cfg.n), 1.0 / (1.0 + 2.0 * cfg.s));
  const double budget_cut = cfg.B / log2n(cfg.n);
  const std::int64_t count = floor_tolerant(std::min(smooth_cut, budget_cut));
  if (count < 1) {
    fail(ErrorCode::InfeasibleSchedule, "no coefficient fits: n^(1/(1+2s)) ^ B/log2 n < 1");
  }
  Schedule schedule;
  schedule.mode = cfg.mode;
  schedule.groups = 1;
  schedule.block_size = static_cast<std::size_t>(count);
  schedule.machines.assign(static_cast<std::size_t>(cfg.m),
                           Assignment{GroupKind::Shared, 0, 0, 0,
                                      IndexRange{0, static_cast<std::size_t>(count)}});
  return schedule;
}

// Groups of floor(m / eta) machines; group g owns block
// [g b, (g + 1) b) of the coefficient numbering, clipped to `cap`.
Schedule block_schedule(const ProtocolConfig& cfg, std::int64_t eta, std::size_t block,
                        std::size_t cap) {
  Schedule schedule;
  schedule.mode = cfg.mode;
  schedule.groups = static_cast<int>(eta);
  schedule.block_size = block;
  const int group_size = cfg.m / static_cast<int>(eta);
  if (group_size < 1) fail(ErrorCode::InfeasibleSchedule, "more groups than machines");

  schedule.machines.assign(static_cast<std::size_t>(cfg.m), Assignment{});
  for (int g = 0; g < eta; ++g) {
    const std::size_t begin = std::min(static_cast<std::size_t>(g) * block, cap);
    const std::size_t end = std::min(static_cast<std::size_t>(g + 1) * block, cap);
    for (int r = 0; r < group_size; ++r) {
      schedule.machines[static_cast<std::size_t>(g * group_size + r)] =
          Assignment{GroupKind::Block, g, 0, 0, IndexRange{begin, end}};
    }
  }
  return schedule;
}

Schedule grouped_l2_schedule(const ProtocolConfig& cfg) {
  const std::size_t block = block_size_for(cfg);
  require_block(block, cfg);
  const double exponent = (1.0 + 2.0 * cfg.s) / (2.0 + 2.0 * cfg.s);
  const double raw = std::pow(cfg.L * cfg.L * static_cast<double>(cfg.n), 1.0 / (2.0 + 2.0 * cfg.s)) *
                     std::pow(log2n(cfg.n) / cfg.B, exponent);
  const std::int64_t eta = std::max<std::int64_t>(std::min<std::int64_t>(floor_tolerant(raw), cfg.m), 1);
  return block_schedule(cfg, eta, block, static_cast<std::size_t>(eta) * block);
}

Schedule linfty_schedule(const ProtocolConfig& cfg) {
  const std::size_t block = block_size_for(cfg);
  require_block(block, cfg);
  const double ln = log2n(cfg.n);
  const double raw = std::pow(static_cast<double>(cfg.n) * std::pow(ln, 2.0 * cfg.s) /
                                  std::pow(cfg.B, 1.0 + 2.0 * cfg.s),
                              1.0 / (2.0 + 2.0 * cfg.s));
  const std::int64_t eta = std::max<std::int64_t>(std::min<std::int64_t>(floor_tolerant(raw), cfg.m), 1);
  const auto cap = static_cast<std::size_t>(std::max<std::int64_t>(
      floor_tolerant(std::pow(static_cast<double>(cfg.n) / ln, 1.0 / (1.0 + 2.0 * cfg.s))), 0));
  return block_schedule(cfg, eta, block, cap);
}

Schedule adaptive_schedule(const ProtocolConfig& cfg) {
  const std::size_t block = block_size_for(cfg);
  require_block(block, cfg);
  AdaptiveLayout layout = adaptive_layout(cfg.n, cfg.m, cfg.B, cfg.s_min);
  if (!layout.feasible) fail(ErrorCode::InfeasibleSchedule, layout.infeasibility);
  if (layout.cut_level + layout.level_groups > kMaxScheduledLevel) {
    fail(ErrorCode::InfeasibleSchedule,
         "adaptive schedule would transmit levels up to " +
             std::to_string(layout.cut_level + layout.level_groups - 1) + "; B is too large");
  }

  Schedule schedule;
  schedule.mode = cfg.mode;
  schedule.block_size = block;
  schedule.machines.assign(static_cast<std::size_t>(cfg.m), Assignment{});

  const int cut = layout.cut_level;
  const IndexRange low{0, (std::size_t{1} << cut) - 1};
  for (int i = 0; i < layout.low_group_size; ++i) {
    schedule.machines[static_cast<std::size_t>(i)] = Assignment{GroupKind::Low, 0, 0, 0, low};
  }
  int groups = 1;
  const std::size_t width = std::size_t{1} << cut;
  for (int t = 0; t < layout.level_groups; ++t) {
    const int start = layout.low_group_size + t * layout.level_group_size;
    const int sub = layout.sub_group_sizes[static_cast<std::size_t>(t)];
    const int level = cut + t;
    for (int l = 1; l <= (1 << t); ++l) {
      const std::size_t begin = flat_index(level, 0) + static_cast<std::size_t>(l - 1) * width;
      for (int r = 0; r < sub; ++r) {
        schedule.machines[static_cast<std::size_t>(start + (l - 1) * sub + r)] =
            Assignment{GroupKind::Level, 0, t, l, IndexRange{begin, begin + width}};
      }
      ++groups;
    }
  }
  schedule.groups = groups;
  schedule.adaptive = std::move(layout);
  return schedule;
}

}  // namespace

std::string to_string(GroupKind kind) {
  switch (kind) {
    case GroupKind::Shared: return "shared";
    case GroupKind::Block: return "block";
    case GroupKind::Low: return "low";
    case GroupKind::Level: return "level";
    case GroupKind::Discarded: return "discarded";
  }
  return "unknown";
}

std::int64_t floor_tolerant(double x) {
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-9 * std::max(1.0, std::abs(x))) {
    return static_cast<std::int64_t>(nearest);
  }
  return static_cast<std::int64_t>(std::floor(x));
}

std::int64_t ceil_tolerant(double x) {
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-9 * std::max(1.0, std::abs(x))) {
    return static_cast<std::int64_t>(nearest);
  }
  return static_cast<std::int64_t>(std::ceil(x));
}

int nominal_message_bits(const CodecParams& params) {
  return 2 + params.fractional_bits();
}

AdaptiveLayout adaptive_layout(std::int64_t n, int m, double B, double s_min) {
  AdaptiveLayout layout;
  const double ln = log2n(n);
  const double block = std::floor(B / ln + 1e-9 * std::max(1.0, B / ln));
  if (!(block >= 1.0)) {
    layout.feasible = false;
    layout.infeasibility = "floor(B / log2 n) = 0; the adaptive schedule needs B >= log2 n";
    return layout;
  }
  layout.cut_level = static_cast<int>(floor_tolerant(std::min(std::log2(block), 1000.0)));
  layout.max_level = static_cast<int>(
      std::min(ceil_tolerant(std::log2(static_cast<double>(n) * B) / (2.0 + 2.0 * s_min)),
               ceil_tolerant(ln / (1.0 + 2.0 * s_min))));
  layout.level_groups = std::max(layout.max_level - layout.cut_level, 0);
  layout.low_group_size = m / 2;
  const int upper_half = m - m / 2;  // ceil(m / 2)

  if (layout.cut_level > 0 && layout.low_group_size < 1) {
    layout.feasible = false;
    layout.infeasibility = "group I is empty (m = " + std::to_string(m) + ")";
  }
  if (layout.level_groups > 0) {
    layout.level_group_size = upper_half / layout.level_groups;
    for (int t = 0; t < layout.level_groups; ++t) {
      const int sub = layout.level_group_size >> t;
      layout.sub_group_sizes.push_back(sub);
      if (sub < 1 && layout.feasible) {
        layout.feasible = false;
        layout.infeasibility =
            "adaptive schedule infeasible: group I_" + std::to_string(t) + " of " +
            std::to_string(layout.level_group_size) + " machines cannot be split into 2^" +
            std::to_string(t) + " non-empty subgroups (needs m >= 2 eta~ 2^(eta~ - 1) with eta~ = " +
            std::to_string(layout.level_groups) + ")";
      }
    }
  }

  const double per_machine = static_cast<double>(n) / static_cast<double>(m);
  const int last_group_level = layout.cut_level + layout.level_groups - 1;
  for (int j = 0; j <= layout.max_level; ++j) {
    double size = 0.0;
    if (j < layout.cut_level || layout.level_groups == 0) {
      size = layout.low_group_size * per_machine;
    } else if (j <= last_group_level) {
      size = layout.sub_group_sizes[static_cast<std::size_t>(j - layout.cut_level)] * per_machine;
    } else {
      // Levels past the last group continue the halving ladder.
      size = layout.sub_group_sizes.back() * per_machine * std::ldexp(1.0, last_group_level - j);
    }
    layout.sample_sizes.push_back(size);
  }
  return layout;
}

std::vector<int> Schedule::owners(std::size_t flat) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < machines.size(); ++i) {
    if (machines[i].range.contains(flat)) out.push_back(static_cast<int>(i));
  }
  return out;
}

Schedule build_schedule(const ProtocolConfig& cfg) {
  cfg.validate();
  Schedule schedule;
  switch (cfg.mode) {
    case Mode::NonAdaptiveI: schedule = shared_schedule(cfg); break;
    case Mode::NonAdaptiveII: schedule = grouped_l2_schedule(cfg); break;
    case Mode::LinftyCombined: schedule = linfty_schedule(cfg); break;
    case Mode::Adaptive: schedule = adaptive_schedule(cfg); break;
  }
  finish(schedule, cfg);
  return schedule;
}

}  // namespace distwave
