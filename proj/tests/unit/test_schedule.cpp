#include "doctest.h"

#include <cmath>
#include <set>

#include "distwave/coeff_field.hpp"
#include "distwave/error.hpp"
#include "distwave/schedule.hpp"

using namespace distwave;

namespace {

ErrorCode code_of(const ProtocolConfig& cfg) {
  try {
    build_schedule(cfg);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

// Grouped-L2 group count evaluated from scratch in long double.
long long reference_eta(long double n, int m, long double B, long double s, long double L) {
  const long double ln = std::log2(n);
  const long double raw = std::pow(L * L * n, 1.0L / (2 + 2 * s)) *
                          std::pow(ln / B, (1 + 2 * s) / (2 + 2 * s));
  long long eta = static_cast<long long>(std::floor(raw + 1e-12L));
  return std::max(1LL, std::min<long long>(eta, m));
}

}  // namespace

TEST_CASE("grouped L2 schedule for n = 2^20, m = 64, B = 40") {
  ProtocolConfig cfg;
  cfg.n = std::int64_t{1} << 20;
  cfg.m = 64;
  cfg.B = 40;
  cfg.s = 1.0;
  cfg.L = 1.0;
  cfg.mode = Mode::NonAdaptiveII;
  const Schedule schedule = build_schedule(cfg);

  const long long eta = reference_eta(std::ldexp(1.0L, 20), 64, 40, 1, 1);
  CHECK(eta == 19);
  CHECK(schedule.groups == eta);
  CHECK(schedule.block_size == 2);
  CHECK(schedule.discarded == 64 - 19 * (64 / 19));
  CHECK(schedule.scheduled == 2 * 19);

  const int per_group = 64 / 19;
  for (int i = 0; i < 64; ++i) {
    const Assignment& a = schedule.machines[static_cast<std::size_t>(i)];
    if (i < 19 * per_group) {
      const int g = i / per_group + 1;  // 1-based group number
      CHECK(a.kind == GroupKind::Block);
      // 1-based index 2^j + k runs over 2(g-1)+1 .. 2g.
      CHECK(a.range.begin + 1 == static_cast<std::size_t>(2 * (g - 1) + 1));
      CHECK(a.range.end == static_cast<std::size_t>(2 * g));
    } else {
      CHECK(a.kind == GroupKind::Discarded);
      CHECK(a.range.empty());
    }
  }
  for (std::size_t flat = 0; flat < schedule.scheduled; ++flat) {
    CHECK(schedule.owners(flat).size() == static_cast<std::size_t>(per_group));
  }
}

TEST_CASE("grouped L2 group count matches the reference over a grid") {
  for (int log_n : {12, 16, 20}) {
    for (double B : {20.0, 64.0, 300.0, 2000.0}) {
      for (double s : {0.5, 1.0, 2.0}) {
        ProtocolConfig cfg;
        cfg.n = std::int64_t{1} << log_n;
        cfg.m = 64;
        cfg.B = B;
        cfg.s = s;
        cfg.mode = Mode::NonAdaptiveII;
        if (B < log_n) continue;
        const Schedule schedule = build_schedule(cfg);
        CHECK(schedule.groups == reference_eta(std::ldexp(1.0L, log_n), 64, B, s, 1));
        CHECK(schedule.block_size == static_cast<std::size_t>(std::floor(B / log_n)));
      }
    }
  }
}

TEST_CASE("shared schedule") {
  ProtocolConfig cfg;
  cfg.n = std::int64_t{1} << 18;
  cfg.m = 16;
  cfg.s = 1.0;
  cfg.B = 64 * 18 * 2;  // above n^{1/3} log2 n
  cfg.mode = Mode::NonAdaptiveI;
  Schedule schedule = build_schedule(cfg);
  CHECK(schedule.scheduled == 64);  // floor(2^{18/3})
  CHECK(schedule.discarded == 0);
  for (const Assignment& a : schedule.machines) {
    CHECK(a.kind == GroupKind::Shared);
    CHECK(a.range == IndexRange{0, 64});
  }
  CHECK(schedule.max_level == 6);  // flat index 63 opens level 6

  cfg.B = 18 * 10 + 5;  // budget-limited: floor(185 / 18) = 10
  schedule = build_schedule(cfg);
  CHECK(schedule.scheduled == 10);
  CHECK(schedule.owners(9).size() == 16);
  CHECK(schedule.owners(10).empty());

  cfg.B = 10;  // below log2 n
  CHECK(code_of(cfg) == ErrorCode::InfeasibleSchedule);
}

TEST_CASE("combined sup-norm schedule") {
  ProtocolConfig cfg;
  cfg.n = std::int64_t{1} << 20;
  cfg.m = 64;
  cfg.s = 1.0;
  cfg.B = 60;
  cfg.mode = Mode::LinftyCombined;
  const Schedule schedule = build_schedule(cfg);
  const double ln = 20.0;
  const double n = std::ldexp(1.0, 20);
  const auto eta = std::max<long long>(
      std::min<long long>(static_cast<long long>(std::floor(
                              std::pow(n * ln * ln / std::pow(60.0, 3.0), 0.25))),
                          64),
      1);
  const auto cap = static_cast<std::size_t>(std::floor(std::cbrt(n / ln)));
  CHECK(schedule.groups == eta);
  CHECK(schedule.block_size == 3);
  CHECK(schedule.scheduled == std::min<std::size_t>(cap, 3 * static_cast<std::size_t>(eta)));
  for (const Assignment& a : schedule.machines) CHECK(a.range.end <= cap);
}

TEST_CASE("adaptive layout for n = 2^16, m = 32, B = 256, s_min = 1") {
  const AdaptiveLayout layout = adaptive_layout(std::int64_t{1} << 16, 32, 256.0, 1.0);
  REQUIRE(layout.feasible);
  CHECK(layout.cut_level == 4);  // floor(log2 floor(256 / 16))
  CHECK(layout.max_level == 6);  // ceil(24 / 4) ^ ceil(16 / 3)
  CHECK(layout.level_groups == 2);
  CHECK(layout.low_group_size == 16);
  CHECK(layout.level_group_size == 8);
  CHECK(layout.sub_group_sizes == std::vector<int>{8, 4});
  const double per = 2048.0;
  CHECK(layout.sample_sizes ==
        std::vector<double>{16 * per, 16 * per, 16 * per, 16 * per, 8 * per, 4 * per, 2 * per});
}

TEST_CASE("adaptive partition owns the level and shift blocks exactly once") {
  ProtocolConfig cfg;
  cfg.n = 40 * 2048;  // j_B = 3, eta~ = 3, sub-groups of 6, 3, 1
  cfg.m = 40;
  cfg.B = 256;
  cfg.s_min = 1.0;
  cfg.mode = Mode::Adaptive;
  const Schedule schedule = build_schedule(cfg);
  REQUIRE(schedule.adaptive.has_value());
  const AdaptiveLayout& layout = *schedule.adaptive;
  const int cut = layout.cut_level;

  CHECK(layout.sub_group_sizes == std::vector<int>{6, 3, 1});
  int used = layout.low_group_size;
  for (int t = 0; t < layout.level_groups; ++t) {
    used += (1 << t) * layout.sub_group_sizes[static_cast<std::size_t>(t)];
  }
  CHECK(schedule.discarded == cfg.m - used);
  CHECK(schedule.discarded == 4);

  // Every coefficient below j_B is sent by all of group I; each coefficient
  // at level j_B + t is sent by exactly one subgroup I_{t,l}.
  for (std::size_t flat = 0; flat < schedule.scheduled; ++flat) {
    const LevelShift at = level_shift(flat);
    const auto owners = schedule.owners(flat);
    if (at.level < cut) {
      CHECK(owners.size() == static_cast<std::size_t>(layout.low_group_size));
      for (int i : owners) CHECK(schedule.machines[static_cast<std::size_t>(i)].kind == GroupKind::Low);
      continue;
    }
    const int t = at.level - cut;
    REQUIRE(owners.size() == static_cast<std::size_t>(layout.sub_group_sizes[static_cast<std::size_t>(t)]));
    std::set<int> labels;
    for (int i : owners) {
      const Assignment& a = schedule.machines[static_cast<std::size_t>(i)];
      CHECK(a.kind == GroupKind::Level);
      CHECK(a.level_offset == t);
      labels.insert(a.sub_group);
    }
    REQUIRE(labels.size() == 1);
    const int l = *labels.begin();
    CHECK(at.shift >= static_cast<std::int64_t>(l - 1) << cut);
    CHECK(at.shift < static_cast<std::int64_t>(l) << cut);
  }
  CHECK(schedule.max_level == cut + layout.level_groups - 1);
}

TEST_CASE("adaptive schedule with m = 2 eta~ is infeasible") {
  ProtocolConfig cfg;
  cfg.n = std::int64_t{1} << 16;
  cfg.m = 4;  // eta~ = 2 for this (n, B, s_min)
  cfg.B = 256;
  cfg.s_min = 1.0;
  cfg.mode = Mode::Adaptive;
  const AdaptiveLayout layout = adaptive_layout(cfg.n, cfg.m, cfg.B, cfg.s_min);
  CHECK(layout.level_groups == 2);
  CHECK_FALSE(layout.feasible);
  try {
    build_schedule(cfg);
    FAIL("expected InfeasibleSchedule");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InfeasibleSchedule);
    CHECK(std::string(e.what()).find("subgroups") != std::string::npos);
  }
}

TEST_CASE("no machine is scheduled beyond its nominal budget") {
  for (Mode mode : {Mode::NonAdaptiveI, Mode::NonAdaptiveII, Mode::LinftyCombined, Mode::Adaptive}) {
    for (double B : {20.0, 40.0, 100.0, 400.0, 3000.0}) {
      ProtocolConfig cfg;
      cfg.n = std::int64_t{1} << 16;
      cfg.m = 64;
      cfg.B = B;
      cfg.s = 0.75;
      cfg.s_min = 0.5;
      cfg.mode = mode;
      Schedule schedule;
      try {
        schedule = build_schedule(cfg);
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InfeasibleSchedule);
        continue;
      }
      for (const Assignment& a : schedule.machines) {
        CHECK(static_cast<double>(a.range.size()) * nominal_message_bits(cfg.codec()) <= B);
      }
    }
  }
}

TEST_CASE("budget below log2 n makes block schedules infeasible") {
  ProtocolConfig cfg;
  cfg.n = std::int64_t{1} << 16;
  cfg.m = 16;
  cfg.B = 8;
  for (Mode mode : {Mode::NonAdaptiveII, Mode::LinftyCombined, Mode::Adaptive}) {
    cfg.mode = mode;
    const ErrorCode code = code_of(cfg);
    CHECK((code == ErrorCode::InfeasibleSchedule || code == ErrorCode::ConfigInvalid));
  }
}

TEST_CASE("tolerant rounding") {
  CHECK(floor_tolerant(2.9999999999999) == 3);
  CHECK(floor_tolerant(2.5) == 2);
  CHECK(ceil_tolerant(3.0000000000001) == 3);
  CHECK(ceil_tolerant(3.2) == 4);
  CHECK(floor_tolerant(std::cbrt(std::ldexp(1.0, 18))) == 64);
}
