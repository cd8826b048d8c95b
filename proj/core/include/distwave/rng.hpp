#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace distwave {

using Engine = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent stream seed from a parent seed and a path of
/// stream identifiers, e.g. (master, cell, replicate) or (replicate, machine).
constexpr std::uint64_t split_seed(std::uint64_t parent,
                                   std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t state = mix64(parent);
  for (std::uint64_t id : path) {
    state = mix64(state ^ mix64(id + 0x632be59bd9b4e019ULL));
  }
  return state;
}

inline Engine make_engine(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return Engine(seq);
}

}  // namespace distwave
